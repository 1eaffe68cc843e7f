#include "stclt/selberg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stclt/error.hpp"

namespace stclt {

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> e(double x) { return std::polar(1.0, 2 * kPi * x); }

constexpr double kImagTolerance = 1e-10;

}  // namespace

TorusInterval make_torus_interval(double alpha, double beta) {
  if (!(0 <= alpha && alpha <= beta && beta <= 0.5))
    throw InvalidArgument("torus interval needs 0 <= alpha <= beta <= 1/2, got [" +
                          std::to_string(alpha) + ", " + std::to_string(beta) + "]");
  return {alpha, beta};
}

TorusInterval map_interval(double a, double b) {
  if (!(-2 <= a && a <= b && b <= 2))
    throw InvalidArgument("map_interval needs -2 <= a <= b <= 2, got [" + std::to_string(a) +
                          ", " + std::to_string(b) + "]");
  return make_torus_interval(std::acos(b / 2) / (2 * kPi), std::acos(a / 2) / (2 * kPi));
}

std::complex<double> indicator_fourier(const TorusInterval& I, long m) {
  if (m == 0) return {I.beta - I.alpha, 0.0};
  const std::complex<double> num = e(-m * I.alpha) - e(-m * I.beta);
  return num / std::complex<double>(0.0, 2 * kPi * m);
}

double vaaler_taper(double t) {
  if (t < 0) t = -t;
  if (t >= 1) return 0;
  if (t < 1e-4) {
    // pi t cot(pi t) = 1 - x/3 - x^2/45 - 2 x^3/945, x = (pi t)^2
    const double x = (kPi * t) * (kPi * t);
    return (1 - t) * (1 - x / 3 - x * x / 45 - 2 * x * x * x / 945) + t;
  }
  return kPi * t * (1 - t) / std::tan(kPi * t) + t;
}

SelbergPair::SelbergPair(const TorusInterval& interval, int M)
    : interval_(make_torus_interval(interval.alpha, interval.beta)), M_(M) {
  if (M < 3) throw InvalidArgument("selberg_pair needs M >= 3, got " + std::to_string(M));
  plus_.resize(M + 1);
  minus_.resize(M + 1);
  // Vaaler: chi = beta - alpha + psi(x - beta) - psi(x - alpha), psi
  // replaced by its tapered polynomial, plus or minus half the Fejer kernel
  // at both endpoints.
  const double width = interval_.beta - interval_.alpha;
  plus_[0] = width + 1.0 / (M + 1);
  minus_[0] = width - 1.0 / (M + 1);
  for (int m = 1; m <= M; ++m) {
    const double t = static_cast<double>(m) / (M + 1);
    const std::complex<double> main = vaaler_taper(t) * indicator_fourier(interval_, m);
    const std::complex<double> fejer =
        (1 - t) / (2.0 * (M + 1)) * (e(-m * interval_.beta) + e(-m * interval_.alpha));
    plus_[m] = main + fejer;
    minus_[m] = main - fejer;
  }
}

std::complex<double> SelbergPair::coeff(Sign sign, long m) const {
  if (m < -M_ || m > M_)
    throw InvalidArgument("coefficient index " + std::to_string(m) + " outside [-M, M]");
  const auto& c = sign == Sign::plus ? plus_ : minus_;
  return m >= 0 ? c[m] : std::conj(c[-m]);
}

SelbergPair selberg_pair(const TorusInterval& interval, int M) { return SelbergPair(interval, M); }

double symmetrized_coeff(const SelbergPair& pair, Sign sign, long m) {
  if (m < 0 || m > pair.M())
    throw InvalidArgument("symmetrized_coeff index " + std::to_string(m) + " outside [0, M]");
  return (pair.coeff(sign, m) + pair.coeff(sign, -m)).real();
}

double u_coeff(const SelbergPair& pair, Sign sign, long m) {
  const int M = pair.M();
  if (m < 1 || m > M) throw InvalidArgument("u_coeff index " + std::to_string(m) + " outside [1, M]");
  if (m >= M - 1) return symmetrized_coeff(pair, sign, m);
  return symmetrized_coeff(pair, sign, m) - symmetrized_coeff(pair, sign, m + 2);
}

std::vector<double> u_coeffs(const SelbergPair& pair, Sign sign) {
  std::vector<double> u(pair.M());
  for (int m = 1; m <= pair.M(); ++m) u[m - 1] = u_coeff(pair, sign, m);
  return u;
}

double evaluate(const SelbergPair& pair, Sign sign, double x) {
  std::complex<double> s = pair.coeff(sign, 0);
  for (int m = 1; m <= pair.M(); ++m)
    s += pair.coeff(sign, m) * e(m * x) + pair.coeff(sign, -m) * e(-m * x);
  if (std::abs(s.imag()) > kImagTolerance)
    throw ConsistencyError("Selberg polynomial has imaginary part " + std::to_string(s.imag()));
  return s.real();
}

std::vector<double> evaluate_grid(const SelbergPair& pair, Sign sign, long N) {
  if (N < 1) throw InvalidArgument("evaluate_grid needs N >= 1");
  std::vector<double> cs(N), sn(N);
  for (long j = 0; j < N; ++j) {
    cs[j] = std::cos(2 * kPi * j / N);
    sn[j] = std::sin(2 * kPi * j / N);
  }
  // Real polynomial: c0 + 2 sum Re(c_m e(m x)).
  std::vector<double> out(N);
  const double c0 = pair.coeff(sign, 0).real();
  std::vector<double> re(pair.M() + 1), im(pair.M() + 1);
  for (int m = 1; m <= pair.M(); ++m) {
    re[m] = pair.coeff(sign, m).real();
    im[m] = pair.coeff(sign, m).imag();
  }
  for (long j = 0; j < N; ++j) {
    double s = 0;
    long idx = 0;
    for (int m = 1; m <= pair.M(); ++m) {
      idx += j;
      if (idx >= N) idx -= N;
      s += re[m] * cs[idx] - im[m] * sn[idx];
    }
    out[j] = c0 + 2 * s;
  }
  return out;
}

}  // namespace stclt
