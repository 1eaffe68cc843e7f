#pragma once

#include "stclt/numeric.hpp"

namespace stclt {

struct RealInterval {
  double a = 0;
  double b = 0;
};

RealInterval make_real_interval(double a, double b);

double semicircle_density(double t);
// Closed form on the mapped torus interval, cross-checked against quadrature.
double semicircle_mass(const RealInterval& I);
double semicircle_mass_closed_form(const RealInterval& I);
double semicircle_mass_quadrature(const RealInterval& I);
double semicircle_cdf(double t);

double plancherel_density(long p, double t);
double plancherel_mass(long p, const RealInterval& I);
double plancherel_cdf(long p, double t);

// E[Z^n] for standard normal Z.
BigInt gaussian_moment(long n);

}  // namespace stclt
