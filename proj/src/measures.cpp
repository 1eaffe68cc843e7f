#include "stclt/measures.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "stclt/error.hpp"
#include "stclt/selberg.hpp"

namespace stclt {

namespace {

constexpr double kPi = std::numbers::pi;

RealInterval clamp_to_support(const RealInterval& I) {
  return {std::clamp(I.a, -2.0, 2.0), std::clamp(I.b, -2.0, 2.0)};
}

// Integrate g(theta) 4 sin^2(2 pi theta) over the torus image of I, which is
// mu_infinity weighted by g(2 cos 2 pi theta).
template <class F>
double theta_integral(const RealInterval& I, F weight) {
  const RealInterval c = clamp_to_support(I);
  if (c.a >= c.b) return 0;
  const TorusInterval T = map_interval(c.a, c.b);
  auto f = [&](double th) {
    const double s = std::sin(2 * kPi * th);
    return 4 * s * s * weight(2 * std::cos(2 * kPi * th));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, T.alpha, T.beta, 15, 1e-14);
}

}  // namespace

RealInterval make_real_interval(double a, double b) {
  if (!(a <= b))
    throw InvalidArgument("interval needs a <= b, got [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  return {a, b};
}

double semicircle_density(double t) {
  if (t < -2 || t > 2) return 0;
  return std::sqrt(std::max(0.0, 1 - t * t / 4)) / kPi;
}

double semicircle_mass_closed_form(const RealInterval& I) {
  const RealInterval c = clamp_to_support(I);
  if (c.a >= c.b) return 0;
  const TorusInterval T = map_interval(c.a, c.b);
  return 2 * (T.beta - T.alpha) -
         (std::sin(4 * kPi * T.beta) - std::sin(4 * kPi * T.alpha)) / (2 * kPi);
}

double semicircle_mass_quadrature(const RealInterval& I) {
  return theta_integral(I, [](double) { return 1.0; });
}

double semicircle_mass(const RealInterval& I) {
  const double closed = semicircle_mass_closed_form(I);
  const double quad = semicircle_mass_quadrature(I);
  if (std::abs(closed - quad) > 1e-10)
    throw ConsistencyError("semicircle mass closed form and quadrature disagree");
  return closed;
}

double semicircle_cdf(double t) {
  if (t <= -2) return 0;
  if (t >= 2) return 1;
  return semicircle_mass_closed_form({-2, t});
}

double plancherel_density(long p, double t) {
  if (p < 2) throw InvalidArgument("plancherel_density needs a prime p");
  if (t < -2 || t > 2) return 0;
  const double sp = std::sqrt(static_cast<double>(p));
  const double r = sp + 1 / sp;
  return (p + 1) / (r * r - t * t) * semicircle_density(t);
}

double plancherel_mass(long p, const RealInterval& I) {
  if (p < 2) throw InvalidArgument("plancherel_mass needs a prime p");
  const double sp = std::sqrt(static_cast<double>(p));
  const double r2 = (sp + 1 / sp) * (sp + 1 / sp);
  return theta_integral(I, [&](double t) { return (p + 1) / (r2 - t * t); });
}

double plancherel_cdf(long p, double t) {
  if (t <= -2) return 0;
  if (t >= 2) return 1;
  return plancherel_mass(p, {-2, t});
}

BigInt gaussian_moment(long n) {
  if (n < 0) throw InvalidArgument("gaussian_moment needs n >= 0");
  if (n % 2 != 0) return 0;
  BigInt r = 1;
  for (long j = n - 1; j > 1; j -= 2) r *= j;
  return r;
}

}  // namespace stclt
