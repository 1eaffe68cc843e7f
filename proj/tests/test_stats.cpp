#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "stclt/error.hpp"
#include "stclt/hecke.hpp"
#include "stclt/measures.hpp"
#include "stclt/qexp.hpp"
#include "stclt/selberg.hpp"
#include "stclt/stats.hpp"
#include "stclt/traceformula.hpp"

using namespace stclt;

namespace {

// tau(n) / n^{11/2} from the product expansion of Delta.
double delta_normalized(int n) {
  const QExpansion d = delta(n + 1);
  return d[n].convert_to<double>() / std::pow(static_cast<double>(n), 5.5);
}

double mean_power(const EigenvalueTable& t, const SelbergPair& pair, Sign s, double x, int n) {
  double acc = 0;
  for (int f = 0; f < t.dim(); ++f) acc += std::pow(s_statistic(t, f, pair, s, x), n);
  return acc / t.dim();
}

// <S^n> by expanding S^n over all n-tuples of (prime, m) pairs and averaging
// each monomial through the trace formula; no compositions, no grouping.
double brute_force_moment(int k, const RealInterval& I, int M, double x, int n, Sign s) {
  const SelbergPair pair(map_interval(I.a, I.b), M);
  const auto U = u_coeffs(pair, s);
  const auto primes = primes_up_to(static_cast<long>(x));
  std::vector<std::pair<int, int>> atoms;
  for (int p : primes)
    for (int m = 1; m <= M; ++m) atoms.emplace_back(p, m);
  std::map<std::vector<std::pair<long, long>>, double> avg;
  auto average = [&](const std::vector<PrimePower>& f) {
    std::vector<std::pair<long, long>> key;
    for (const auto& pp : f) key.emplace_back(pp.p, pp.m);
    auto it = avg.find(key);
    if (it == avg.end())
      it = avg.emplace(key, averaged_product(k, f).value.convert_to<double>()).first;
    return it->second;
  };
  std::vector<std::size_t> idx(n, 0);
  double total = 0;
  while (true) {
    std::map<long, std::vector<long>> per_prime;
    double coeff = 1;
    for (int i = 0; i < n; ++i) {
      per_prime[atoms[idx[i]].first].push_back(atoms[idx[i]].second);
      coeff *= U[atoms[idx[i]].second - 1];
    }
    // Expand each prime's product of X_m into sum_t D(t) X_t, then average.
    std::vector<std::pair<long, std::map<long, BigInt>>> parts;
    for (const auto& [p, ms] : per_prime) parts.emplace_back(p, hecke_product_expansion(ms));
    std::vector<std::map<long, BigInt>::const_iterator> it;
    for (const auto& pr : parts) it.push_back(pr.second.begin());
    while (true) {
      std::vector<PrimePower> f;
      double d = 1;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        f.push_back({parts[j].first, it[j]->first});
        d *= it[j]->second.convert_to<double>();
      }
      total += coeff * d * average(f);
      std::size_t j = 0;
      while (j < parts.size() && ++it[j] == parts[j].second.end()) {
        it[j] = parts[j].second.begin();
        ++j;
      }
      if (j == parts.size()) break;
    }
    int i = 0;
    while (i < n && ++idx[i] == atoms.size()) idx[i++] = 0;
    if (i == n) break;
  }
  return total;
}

}  // namespace

TEST(CountInInterval, Examples) {
  const auto t = eigen_system(12, 10);
  EXPECT_EQ(count_in_interval(t, 0, {-2, 2}, 10), prime_pi(10));
  EXPECT_EQ(count_in_interval(t, 0, {0.123, 0.123}, 10), 0);
  int expect = 0;
  for (int p : {2, 3, 5, 7}) expect += std::abs(delta_normalized(p)) <= 1;
  EXPECT_EQ(expect, 4);
  EXPECT_EQ(count_in_interval(t, 0, {-1, 1}, 10), 4);
  EXPECT_EQ(count_in_interval(t, 0, {-1, 1}, 4), 2);
  // Closed endpoints.
  const double a2 = t.values[0][t.prime_index(2)];
  EXPECT_EQ(count_in_interval(t, 0, {a2, a2}, 10), 1);
  EXPECT_THROW(count_in_interval(t, 1, {-1, 1}, 10), InvalidArgument);
}

TEST(CountInInterval, MissingPrimesNameLargestAvailable) {
  const auto t = eigen_system(12, 10);
  try {
    count_in_interval(t, 0, {-1, 1}, 20);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("largest available prime is 7"), std::string::npos)
        << e.what();
  }
}

TEST(SStatistic, SummationFormsAgree) {
  const auto t = eigen_system(12, 10);
  const SelbergPair pair(map_interval(-1, 1), 10);
  for (Sign s : {Sign::plus, Sign::minus}) {
    const double a = s_statistic_definition(t, 0, pair, s, 10);
    const double b = s_statistic_u_form(t, 0, pair, s, 10);
    EXPECT_LT(std::abs(a - b), 1e-9);
    EXPECT_EQ(s_statistic(t, 0, pair, s, 10), a);
  }
}

TEST(SStatistic, MatchesPolynomialEvaluation) {
  // N-side of the sandwich: sum_p [S(theta) + S(-theta)] equals
  // pi(x) sym(0) + sum_m sym(m) sum_p 2 cos(m theta) = pi(x)(sym(0) - sym(2)) + S.
  const auto t = eigen_system(36, 20);
  const RealInterval I{-0.4, 1.7};
  const SelbergPair pair(map_interval(I.a, I.b), 9);
  for (int f = 0; f < t.dim(); ++f) {
    for (Sign s : {Sign::plus, Sign::minus}) {
      double direct = 0;
      for (int p : primes_up_to(20)) {
        const double theta = std::acos(t.values[f][t.prime_index(p)] / 2) / (2 * std::acos(-1.0));
        direct += evaluate(pair, s, theta) + evaluate(pair, s, -theta);
      }
      const double pi_x = static_cast<double>(prime_pi(20));
      const double via_s = pi_x * (symmetrized_coeff(pair, s, 0) - symmetrized_coeff(pair, s, 2)) +
                           s_statistic(t, f, pair, s, 20);
      EXPECT_NEAR(direct, via_s, 1e-9);
    }
  }
}

TEST(SStatistic, SandwichInequalities) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> end(-2, 2);
  std::uniform_int_distribution<int> pick_k(6, 60), pick_M(3, 14), pick_x(2, 30);
  for (int trial = 0; trial < 15; ++trial) {
    const int k = 2 * pick_k(rng);
    const double x = pick_x(rng);
    const int M = pick_M(rng);
    double a = end(rng), b = end(rng);
    if (a > b) std::swap(a, b);
    const RealInterval I{a, b};
    const auto t = eigen_system(k, 30);
    const SelbergPair pair(map_interval(a, b), M);
    const double pi_x = static_cast<double>(prime_pi(x));
    for (int f = 0; f < t.dim(); ++f) {
      const double N = static_cast<double>(count_in_interval(t, f, I, x));
      const double sp = s_statistic(t, f, pair, Sign::plus, x);
      const double sm = s_statistic(t, f, pair, Sign::minus, x);
      const auto sym = [&](Sign s, int m) { return symmetrized_coeff(pair, s, m); };
      EXPECT_LE(N - pi_x * (sym(Sign::plus, 0) - sym(Sign::plus, 2)), sp + 1e-9);
      EXPECT_LE(sm, N - pi_x * (sym(Sign::minus, 0) - sym(Sign::minus, 2)) + 1e-9);
    }
  }
}

TEST(DefaultM, Examples) {
  EXPECT_EQ(default_M(16), 3);
  EXPECT_EQ(default_M(100), 7);
  EXPECT_THROW(default_M(15.9), InvalidArgument);
  int prev = 0;
  for (double x = 16; x < 5000; x *= 1.07) {
    const int m = default_M(x);
    EXPECT_GE(m, prev);
    prev = m;
  }
}

TEST(EmpiricalMoments, Examples) {
  const auto c = empirical_moments({1.5, 1.5, 1.5}, 4);
  for (int n = 0; n <= 4; ++n) EXPECT_DOUBLE_EQ(c[n], std::pow(1.5, n));
  const auto pm = empirical_moments({-1, 1}, 5);
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(pm[n], n % 2 ? 0 : 1);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::vector<double> s(1000000);
  for (auto& v : s) v = g(rng);
  EXPECT_NEAR(empirical_moments(s, 4)[4], 3, 0.05);
  EXPECT_THROW(empirical_moments({}, 2), InvalidArgument);
  EXPECT_THROW(empirical_moments({1.0}, 0), InvalidArgument);
}

TEST(TheoreticalMoment, ZerothAndFirst) {
  const RealInterval I{-1, 1};
  EXPECT_EQ(theoretical_s_moment(12, I, 3, 10, 0, Sign::plus), 1);
  const auto t = eigen_system(12, 10);
  const SelbergPair pair(map_interval(-1, 1), 3);
  for (Sign s : {Sign::plus, Sign::minus}) {
    const double th = theoretical_s_moment(12, I, 3, 10, 1, s).convert_to<double>();
    EXPECT_LT(std::abs(th - mean_power(t, pair, s, 10, 1)), 1e-9);
  }
}

TEST(TheoreticalMoment, MatchesTupleExpansion) {
  for (int k : {12, 24, 120}) {
    for (int n = 1; n <= 3; ++n) {
      const RealInterval I{-0.3, 1.2};
      const double th = theoretical_s_moment(k, I, 3, 5, n, Sign::minus).convert_to<double>();
      const double bf = brute_force_moment(k, I, 3, 5, n, Sign::minus);
      EXPECT_NEAR(th, bf, 1e-9 * std::max(1.0, std::abs(bf))) << "k=" << k << " n=" << n;
    }
  }
}

TEST(TheoreticalMoment, DiagonalIdentityTerm) {
  // Only X_0 survives in every a_f(p^t) average when it is replaced by [t == 0];
  // that leaves the p1 = p2, m1 = m2 diagonal, pi(x) sum U(m)^2.
  const RealInterval I{-1, 1};
  const int M = 3;
  const SelbergPair pair(map_interval(I.a, I.b), M);
  const auto U = u_coeffs(pair, Sign::plus);
  double diag = 0;
  for (double u : U) diag += u * u;
  diag *= static_cast<double>(prime_pi(10));
  double zero_part = 0;
  for (int p : primes_up_to(10))
    for (int m1 = 1; m1 <= M; ++m1)
      for (int m2 = 1; m2 <= M; ++m2) {
        const auto D = hecke_product_expansion({m1, m2});
        if (D.count(0)) zero_part += U[m1 - 1] * U[m2 - 1] * D.at(0).convert_to<double>();
      }
  EXPECT_NEAR(zero_part, diag, 1e-12);
  // Off the diagonal, <a_f(p^t)> tends to the mu_p moment p^{-t/2} (t even)
  // as k grows, which gives the full limiting second moment.
  auto plancherel = [](int p, long t) { return t % 2 ? 0.0 : std::pow(p, -t / 2.0); };
  double limit = 0;
  for (int p : primes_up_to(5))
    for (int q : primes_up_to(5))
      for (int m1 = 1; m1 <= M; ++m1)
        for (int m2 = 1; m2 <= M; ++m2) {
          const double w = U[m1 - 1] * U[m2 - 1];
          if (p != q) {
            limit += w * plancherel(p, m1) * plancherel(q, m2);
            continue;
          }
          for (const auto& [t, c] : hecke_product_expansion({m1, m2}))
            limit += w * c.convert_to<double>() * plancherel(p, t);
        }
  for (int k : {2400, 4800}) {
    const double th = theoretical_s_moment(k, I, M, 5, 2, Sign::plus).convert_to<double>();
    EXPECT_NEAR(th, limit, 0.02 * limit) << "k=" << k;
  }
}

TEST(TheoreticalMoment, DualPathAgainstEigenvalues) {
  for (int k : {12, 24, 36}) {
    const auto t = eigen_system(k, 10);
    for (int M : {3, 4}) {
      const RealInterval I{-1, 1};
      const SelbergPair pair(map_interval(I.a, I.b), M);
      for (Sign s : {Sign::plus, Sign::minus})
        for (int n = 1; n <= 3; ++n) {
          const double th = theoretical_s_moment(k, I, M, 10, n, s).convert_to<double>();
          EXPECT_LT(std::abs(th - mean_power(t, pair, s, 10, n)), 1e-6)
              << "k=" << k << " M=" << M << " n=" << n;
        }
    }
  }
}

TEST(TheoreticalMoment, Guards) {
  EXPECT_THROW(theoretical_s_moment(12, {-1, 1}, 12, 1000, 2, Sign::plus), ResourceError);
  EXPECT_THROW(theoretical_s_moment(10, {-1, 1}, 3, 10, 1, Sign::plus), InvalidArgument);
}

TEST(VarianceReport, Examples) {
  const auto t = eigen_system(120, 10);
  auto r = variance_report(t, {-2, 2}, 10);
  EXPECT_EQ(r.empirical, 0);
  EXPECT_EQ(r.predicted, 0);
  r = variance_report(t, {0.11, 0.11}, 10);
  EXPECT_EQ(r.empirical, 0);
  EXPECT_EQ(r.predicted, 0);
  r = variance_report(t, {-1, 1}, 10);
  const double mu = semicircle_mass({-1, 1});
  EXPECT_NEAR(r.predicted, 4 * (mu - mu * mu), 1e-12);
  EXPECT_GT(r.empirical, 0);
  EXPECT_THROW(variance_report(eigen_system(12, 10), {-1, 1}, 10), InvalidArgument);
}

TEST(KsDistance, Examples) {
  const int n = 99;
  std::vector<double> q;
  for (int i = 1; i <= n; ++i) q.push_back(static_cast<double>(i) / (n + 1));
  const auto uniform = [](double t) { return std::clamp(t, 0.0, 1.0); };
  EXPECT_LE(ks_distance(q, uniform), 1.0 / (n + 1) + 1e-12);
  EXPECT_DOUBLE_EQ(ks_distance({0.0}, normal_cdf), 0.5);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  std::vector<double> s(100000);
  for (auto& v : s) v = g(rng);
  std::sort(s.begin(), s.end());
  EXPECT_LT(ks_distance(s, normal_cdf), 0.01);
  EXPECT_THROW(ks_distance({1.0, 0.0}, normal_cdf), InvalidArgument);
  EXPECT_THROW(ks_distance({}, normal_cdf), InvalidArgument);
}

TEST(VerticalDistribution, RangeAndMeasureChoice) {
  const auto t = eigen_system(600, 2);
  const auto r = vertical_distribution(t, 2);
  EXPECT_EQ(r.sample_size, t.dim());
  EXPECT_GE(r.ks_plancherel, 0);
  EXPECT_LE(r.ks_plancherel, 1);
  EXPECT_GE(r.ks_semicircle, 0);
  EXPECT_LE(r.ks_semicircle, 1);
  EXPECT_LT(r.ks_plancherel, r.ks_semicircle);
  EXPECT_THROW(vertical_distribution(t, 3), PreconditionError);
}

TEST(Fluctuation, NormalizationAndReport) {
  const auto t = eigen_system(240, 20);
  const RealInterval I{-1, 1};
  const auto s = fluctuation_sample(t, I, 20, 6);
  ASSERT_EQ(static_cast<int>(s.per_form.size()), dim_cusp_forms(240));
  const double mu = semicircle_mass_closed_form(I);
  EXPECT_EQ(s.mu, mu);
  for (const auto& f : s.per_form) {
    EXPECT_GE(f.N, 0);
    EXPECT_LE(f.N, s.pi_x);
    EXPECT_DOUBLE_EQ(f.z, (f.N - s.pi_x * mu) / std::sqrt(s.pi_x * (mu - mu * mu)));
  }
  const auto r = stats_report(s, 6);
  EXPECT_EQ(r.moments[0], 1);
  EXPECT_EQ(r.sample_size, dim_cusp_forms(240));
  ASSERT_EQ(r.gaussian_targets.size(), 7u);
  EXPECT_EQ(r.gaussian_targets[4], 3);
  EXPECT_GE(r.ks_gaussian, 0);
  EXPECT_FALSE(r.degenerate);
  EXPECT_GT(mean_square_gap(s, Sign::plus), 0);
}

TEST(Fluctuation, DegenerateInterval) {
  const auto t = eigen_system(120, 10);
  const auto s = fluctuation_sample(t, {-2, 2}, 10, 3);
  EXPECT_TRUE(s.degenerate);
  for (const auto& f : s.per_form) EXPECT_EQ(f.z, 0);
  EXPECT_TRUE(stats_report(s, 4).degenerate);
  EXPECT_THROW(mean_square_gap(s, Sign::minus), InvalidArgument);
}

// default_M(x) is 3 for x <= 20, so compare against the largest desk-scale M.
TEST(Fluctuation, MeanSquareGapShrinksWithM) {
  const auto t = eigen_system(2000, 20);
  for (Sign s : {Sign::plus, Sign::minus}) {
    const double small = mean_square_gap(fluctuation_sample(t, {-1, 1}, 20, 3), s);
    const double large = mean_square_gap(fluctuation_sample(t, {-1, 1}, 20, 12), s);
    EXPECT_LT(large, small);
  }
}

TEST(NormalCdf, Values) {
  EXPECT_DOUBLE_EQ(normal_cdf(0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(-1), 0.15865525393145707, 1e-14);
}
