#pragma once

#include <functional>
#include <vector>

#include "stclt/hecke.hpp"
#include "stclt/measures.hpp"
#include "stclt/numeric.hpp"
#include "stclt/selberg.hpp"

namespace stclt {

struct FormFluctuation {
  long N = 0;
  double s_plus = 0;
  double s_minus = 0;
  double z = 0;
};

struct FluctuationSample {
  int weight = 0;
  double x = 0;
  RealInterval interval;
  int M = 0;
  long pi_x = 0;
  double mu = 0;  // semicircle mass of the interval, closed form
  bool degenerate = false;  // mu in {0, 1}: Z is identically 0
  std::vector<FormFluctuation> per_form;
};

struct StatsReport {
  int weight = 0;
  double x = 0;
  int M = 0;
  RealInterval interval;
  int sample_size = 0;
  std::vector<double> moments;  // empirical moments of Z, index 0..n_max
  double variance = 0;
  std::vector<double> gaussian_targets;
  double ks_gaussian = 0;
  bool degenerate = false;  // mu in {0, 1}: Z is identically 0
};

// N_I(f, x) = #{p <= x : a <= a_f(p) <= b}.
long count_in_interval(const EigenvalueTable& table, int form, const RealInterval& I, double x);

// S(M, f)(x) as sym(1) sum a(p) + sym(2) sum a(p^2)
//   + sum_{m>=3} sym(m) sum (a(p^m) - a(p^{m-2})).
double s_statistic_definition(const EigenvalueTable& table, int form, const SelbergPair& pair,
                               Sign sign, double x);
// sum_m U(m) sum_p a_f(p^m).
double s_statistic_u_form(const EigenvalueTable& table, int form, const SelbergPair& pair,
                          Sign sign, double x);
// Both forms, asserted equal.
double s_statistic(const EigenvalueTable& table, int form, const SelbergPair& pair, Sign sign,
                   double x);

// max(3, floor(sqrt(pi(x)) log log x)), x >= 16.
int default_M(double x);

// moments[n] = mean of sample^n for n = 0..n_max.
std::vector<double> empirical_moments(const std::vector<double>& samples, int n_max);

// <(S(M, f)(x))^n> from the trace formula through the multinomial expansion
// over distinct prime tuples.
HighReal theoretical_s_moment(int k, const RealInterval& I, int M, double x, int n, Sign sign);

struct VarianceReport {
  double empirical = 0;
  double predicted = 0;
};

VarianceReport variance_report(const EigenvalueTable& table, const RealInterval& I, double x);

// sup |F_n - F| for sorted samples.
double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf);

struct VerticalReport {
  int weight = 0;
  int p = 0;
  int sample_size = 0;
  double ks_plancherel = 0;
  double ks_semicircle = 0;
};

VerticalReport vertical_distribution(const EigenvalueTable& table, int p);

FluctuationSample fluctuation_sample(const EigenvalueTable& table, const RealInterval& I, double x,
                                     int M);

StatsReport stats_report(const FluctuationSample& sample, int n_max);

// <(N - pi(x) mu - S)^2> / (pi(x)(mu - mu^2)).
double mean_square_gap(const FluctuationSample& sample, Sign sign);

double normal_cdf(double z);

}  // namespace stclt
