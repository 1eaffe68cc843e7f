#pragma once

#include <complex>
#include <vector>

namespace stclt {

// [alpha, beta] inside [0, 1/2] on R/Z.
struct TorusInterval {
  double alpha = 0;
  double beta = 0;
};

TorusInterval make_torus_interval(double alpha, double beta);

// theta in I_1 iff 2 cos(2 pi theta) in [a, b].
TorusInterval map_interval(double a, double b);

// Fourier coefficient of the indicator of [alpha, beta].
std::complex<double> indicator_fourier(const TorusInterval& interval, long m);

enum class Sign { plus, minus };

// Vaaler's taper J(t) = pi t (1 - t) cot(pi t) + t on [0, 1), J(0) = 1.
double vaaler_taper(double t);

// Beurling-Selberg majorant (plus) and minorant (minus) of degree M.
class SelbergPair {
 public:
  SelbergPair(const TorusInterval& interval, int M);

  const TorusInterval& interval() const noexcept { return interval_; }
  int M() const noexcept { return M_; }
  // Coefficient at m in [-M, M]; coefficients at -m are conjugates.
  std::complex<double> coeff(Sign sign, long m) const;

 private:
  TorusInterval interval_;
  int M_;
  std::vector<std::complex<double>> plus_, minus_;  // m = 0..M
};

SelbergPair selberg_pair(const TorusInterval& interval, int M);

// S(m) + S(-m) for 0 <= m <= M.
double symmetrized_coeff(const SelbergPair& pair, Sign sign, long m);

// U(m) = S(m) - S(m+2) for m <= M-2, S(m) for m in {M-1, M}.
double u_coeff(const SelbergPair& pair, Sign sign, long m);
std::vector<double> u_coeffs(const SelbergPair& pair, Sign sign);  // index m = 1..M at m-1

// sum_{|m| <= M} coeff(m) e(m x).
double evaluate(const SelbergPair& pair, Sign sign, double x);

// evaluate at x = j/N for j = 0..N-1, with exact reduction of m j mod N.
std::vector<double> evaluate_grid(const SelbergPair& pair, Sign sign, long N);

}  // namespace stclt
