#include "stclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "stclt/error.hpp"
#include "stclt/qexp.hpp"
#include "stclt/traceformula.hpp"

namespace stclt {

namespace {

constexpr double kFormsAgreeTolerance = 1e-9;
constexpr double kFactorBound = 1e18;
constexpr double kMaxMomentTerms = 1e8;
constexpr long kDirectTraceLimit = 20'000;

// Indices into table.primes of every prime <= x.
std::vector<int> prime_columns(const EigenvalueTable& table, double x) {
  std::vector<int> cols;
  for (int p : primes_up_to(static_cast<long>(std::floor(x)))) {
    const int idx = table.prime_index(p);
    if (idx < 0) {
      const std::string largest =
          table.primes.empty() ? "none" : std::to_string(table.primes.back());
      throw PreconditionError("prime " + std::to_string(p) + " <= x missing from table of weight " +
                              std::to_string(table.weight) + "; largest available prime is " +
                              largest);
    }
    cols.push_back(idx);
  }
  return cols;
}

void check_form(const EigenvalueTable& table, int form) {
  if (form < 0 || form >= table.dim())
    throw InvalidArgument("form index " + std::to_string(form) + " outside table of dimension " +
                          std::to_string(table.dim()));
}

double variance_scale(long pi_x, double mu) { return pi_x * (mu - mu * mu); }

bool degenerate_mass(double mu) { return !(mu * (1 - mu) > 1e-15); }

// Ordered compositions of n into u positive parts.
void compositions(int n, int u, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (u == 0) {
    if (n == 0) out.push_back(cur);
    return;
  }
  for (int r = 1; r <= n - (u - 1); ++r) {
    cur.push_back(r);
    compositions(n - r, u - 1, cur, out);
    cur.pop_back();
  }
}

void combinations(int count, int u, int start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == u) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < count; ++i) {
    cur.push_back(i);
    combinations(count, u, i + 1, cur, out);
    cur.pop_back();
  }
}

// <prod_i a_f(q_i^{t_i})> with memoization; the Hecke algebra is only built
// once a product exceeds the direct trace range.
class AverageCache {
 public:
  explicit AverageCache(int k) : k_(k) {}

  const HighReal& get(std::vector<PrimePower> factors) {
    factors.erase(std::remove_if(factors.begin(), factors.end(),
                                 [](const PrimePower& f) { return f.m == 0; }),
                  factors.end());
    std::vector<std::pair<long, long>> key;
    for (const auto& f : factors) key.emplace_back(f.p, f.m);
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    BigInt n = 1;
    for (const auto& f : factors) n *= ipow(f.p, static_cast<unsigned long>(f.m));
    AveragedProduct ap;
    if (n <= kDirectTraceLimit) {
      ap = averaged_product(k_, factors);
    } else {
      if (!algebra_) algebra_ = std::make_unique<HeckeTraceAlgebra>(k_);
      ap = averaged_product(*algebra_, factors);
    }
    return cache_.emplace(std::move(key), ap.value).first->second;
  }

 private:
  int k_;
  std::unique_ptr<HeckeTraceAlgebra> algebra_;
  std::map<std::vector<std::pair<long, long>>, HighReal> cache_;
};

}  // namespace

long count_in_interval(const EigenvalueTable& table, int form, const RealInterval& I, double x) {
  check_form(table, form);
  const RealInterval J = make_real_interval(I.a, I.b);
  long count = 0;
  for (int idx : prime_columns(table, x)) {
    const double v = table.values[form][idx];
    if (J.a <= v && v <= J.b) ++count;
  }
  return count;
}

double s_statistic_definition(const EigenvalueTable& table, int form, const SelbergPair& pair,
                              Sign sign, double x) {
  check_form(table, form);
  const std::vector<int> cols = prime_columns(table, x);
  double total = 0;
  for (int m = 1; m <= pair.M(); ++m) {
    double inner = 0;
    for (int idx : cols) {
      const double a = table.values[form][idx];
      inner += prime_power_eigenvalue(a, m);
      if (m >= 3) inner -= prime_power_eigenvalue(a, m - 2);
    }
    total += symmetrized_coeff(pair, sign, m) * inner;
  }
  return total;
}

double s_statistic_u_form(const EigenvalueTable& table, int form, const SelbergPair& pair,
                          Sign sign, double x) {
  check_form(table, form);
  const std::vector<int> cols = prime_columns(table, x);
  const std::vector<double> U = u_coeffs(pair, sign);
  double total = 0;
  for (int m = 1; m <= pair.M(); ++m) {
    double inner = 0;
    for (int idx : cols) inner += prime_power_eigenvalue(table.values[form][idx], m);
    total += U[m - 1] * inner;
  }
  return total;
}

double s_statistic(const EigenvalueTable& table, int form, const SelbergPair& pair, Sign sign,
                   double x) {
  const double a = s_statistic_definition(table, form, pair, sign, x);
  const double b = s_statistic_u_form(table, form, pair, sign, x);
  if (std::abs(a - b) > kFormsAgreeTolerance * std::max(1.0, std::abs(a)))
    throw ConsistencyError("S(M, f)(x) summation forms disagree: " + std::to_string(a) + " vs " +
                           std::to_string(b));
  return a;
}

int default_M(double x) {
  if (!(x >= 16))
    throw InvalidArgument("default_M needs x >= 16 so that log log x > 1; supply M explicitly");
  const double v = std::sqrt(static_cast<double>(prime_pi(x))) * std::log(std::log(x));
  return std::max(3, static_cast<int>(std::floor(v)));
}

std::vector<double> empirical_moments(const std::vector<double>& samples, int n_max) {
  if (samples.empty()) throw InvalidArgument("empirical_moments needs a nonempty sample");
  if (n_max < 1) throw InvalidArgument("empirical_moments needs n_max >= 1");
  std::vector<double> out(n_max + 1, 0.0);
  for (double s : samples) {
    double pw = 1;
    for (int n = 0; n <= n_max; ++n) {
      out[n] += pw;
      pw *= s;
    }
  }
  for (double& v : out) v /= static_cast<double>(samples.size());
  return out;
}

HighReal theoretical_s_moment(int k, const RealInterval& I, int M, double x, int n, Sign sign) {
  if (n < 0) throw InvalidArgument("moment order must be >= 0");
  if (dim_cusp_forms(k) < 1) throw InvalidArgument("theoretical_s_moment needs dim S_k >= 1");
  ScopedPrecision prec(256);
  if (n == 0) return HighReal(1);

  const SelbergPair pair(map_interval(I.a, I.b), M);
  const std::vector<double> U = u_coeffs(pair, sign);
  const std::vector<int> primes = primes_up_to(static_cast<long>(std::floor(x)));
  if (primes.empty()) return HighReal(0);
  const double worst = static_cast<double>(n) * M * std::log(static_cast<double>(primes.back()));
  if (worst > std::log(kFactorBound))
    throw ResourceError("prime power " + std::to_string(primes.back()) + "^" +
                        std::to_string(n * M) + " exceeds the 1e18 factor bound");

  // c[r][t]: coefficient of X_t in (sum_m U(m) X_m)^r.
  std::vector<std::vector<HighReal>> c(n + 1);
  c[1].assign(M + 1, HighReal(0));
  for (int m = 1; m <= M; ++m) c[1][m] = U[m - 1];
  for (int r = 2; r <= n; ++r) {
    c[r].assign(r * M + 1, HighReal(0));
    for (int a = 0; a <= (r - 1) * M; ++a) {
      if (c[r - 1][a] == 0) continue;
      for (int b = 1; b <= M; ++b) {
        if (a == 0) {
          c[r][b] += c[r - 1][0] * c[1][b];
          continue;
        }
        for (const auto& [t, mult] : hecke_product_expansion({a, b}))
          c[r][t] += c[r - 1][a] * c[1][b] * HighReal(mult);
      }
    }
  }

  std::vector<std::vector<int>> supports(n + 1);
  for (int r = 1; r <= n; ++r)
    for (int t = 0; t < static_cast<int>(c[r].size()); ++t)
      if (c[r][t] != 0) supports[r].push_back(t);

  const int pi_x = static_cast<int>(primes.size());
  const int u_max = std::min(n, pi_x);

  std::vector<std::vector<std::vector<int>>> comps(u_max + 1);
  std::vector<std::vector<std::vector<int>>> combos(u_max + 1);
  double term_count = 0;
  for (int u = 1; u <= u_max; ++u) {
    std::vector<int> cur;
    compositions(n, u, cur, comps[u]);
    combinations(pi_x, u, 0, cur, combos[u]);
    for (const auto& comp : comps[u]) {
      double per = 1;
      for (int r : comp) per *= static_cast<double>(supports[r].size());
      term_count += per * static_cast<double>(combos[u].size());
    }
  }
  if (term_count > kMaxMomentTerms)
    throw ResourceError("theoretical_s_moment would need " + std::to_string(term_count) +
                        " (tuple, partition) terms");

  std::vector<HighReal> factorial(n + 1, HighReal(1));
  for (int j = 1; j <= n; ++j) factorial[j] = factorial[j - 1] * j;

  AverageCache cache(k);
  HighReal total = 0;
  for (int u = 1; u <= u_max; ++u) {
    for (const auto& comp : comps[u]) {
      // Sorted prime tuples times ordered compositions enumerate each
      // ordered distinct tuple of the expansion once; the 1/u! cancels.
      HighReal weight = factorial[n];
      for (int r : comp) weight /= factorial[r];
      for (const auto& combo : combos[u]) {
        std::vector<PrimePower> factors(u);
        std::vector<std::size_t> pos(u, 0);
        HighReal inner = 0;
        while (true) {
          HighReal coeff = 1;
          for (int i = 0; i < u; ++i) {
            const int t = supports[comp[i]][pos[i]];
            factors[i] = {primes[combo[i]], t};
            coeff *= c[comp[i]][t];
          }
          inner += coeff * cache.get(factors);
          int i = u - 1;
          while (i >= 0 && ++pos[i] == supports[comp[i]].size()) pos[i--] = 0;
          if (i < 0) break;
        }
        total += weight * inner;
      }
    }
  }
  return total;
}

VarianceReport variance_report(const EigenvalueTable& table, const RealInterval& I, double x) {
  if (table.dim() < 2) throw InvalidArgument("variance_report needs at least two forms");
  const double mu = semicircle_mass_closed_form(I);
  std::vector<double> counts;
  for (int f = 0; f < table.dim(); ++f)
    counts.push_back(static_cast<double>(count_in_interval(table, f, I, x)));
  const std::vector<double> mom = empirical_moments(counts, 2);
  VarianceReport out;
  out.empirical = std::max(0.0, mom[2] - mom[1] * mom[1]);
  out.predicted = variance_scale(prime_pi(x), mu);
  if (degenerate_mass(mu)) out.predicted = 0;
  return out;
}

double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw InvalidArgument("ks_distance needs a nonempty sample");
  if (!std::is_sorted(sorted.begin(), sorted.end()))
    throw InvalidArgument("ks_distance needs sorted samples");
  const double n = static_cast<double>(sorted.size());
  double d = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double F = cdf(sorted[i]);
    d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(j) / n - F));
    i = j;
  }
  return d;
}

VerticalReport vertical_distribution(const EigenvalueTable& table, int p) {
  if (table.dim() < 1) throw InvalidArgument("vertical_distribution needs dim S_k >= 1");
  const int idx = table.prime_index(p);
  if (idx < 0)
    throw PreconditionError("prime " + std::to_string(p) + " missing from table of weight " +
                            std::to_string(table.weight));
  std::vector<double> v;
  for (const auto& row : table.values) v.push_back(row[idx]);
  std::sort(v.begin(), v.end());
  VerticalReport out;
  out.weight = table.weight;
  out.p = p;
  out.sample_size = table.dim();
  out.ks_plancherel = ks_distance(v, [p](double t) { return plancherel_cdf(p, t); });
  out.ks_semicircle = ks_distance(v, [](double t) { return semicircle_cdf(t); });
  return out;
}

FluctuationSample fluctuation_sample(const EigenvalueTable& table, const RealInterval& I, double x,
                                     int M) {
  FluctuationSample s;
  s.weight = table.weight;
  s.x = x;
  s.interval = make_real_interval(I.a, I.b);
  s.M = M;
  s.pi_x = prime_pi(x);
  s.mu = semicircle_mass_closed_form(s.interval);
  s.degenerate = degenerate_mass(s.mu);
  const SelbergPair pair(map_interval(I.a, I.b), M);
  const double scale = std::sqrt(variance_scale(s.pi_x, s.mu));
  for (int f = 0; f < table.dim(); ++f) {
    FormFluctuation r;
    r.N = count_in_interval(table, f, s.interval, x);
    r.s_plus = s_statistic(table, f, pair, Sign::plus, x);
    r.s_minus = s_statistic(table, f, pair, Sign::minus, x);
    r.z = s.degenerate ? 0.0 : (r.N - s.pi_x * s.mu) / scale;
    s.per_form.push_back(r);
  }
  return s;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

StatsReport stats_report(const FluctuationSample& sample, int n_max) {
  if (sample.per_form.empty()) throw InvalidArgument("stats_report needs a nonempty sample");
  StatsReport r;
  r.weight = sample.weight;
  r.x = sample.x;
  r.M = sample.M;
  r.interval = sample.interval;
  r.sample_size = static_cast<int>(sample.per_form.size());
  r.degenerate = sample.degenerate;
  std::vector<double> z;
  for (const auto& f : sample.per_form) z.push_back(f.z);
  r.moments = empirical_moments(z, n_max);
  const std::vector<double> m2 = empirical_moments(z, 2);
  r.variance = std::max(0.0, m2[2] - m2[1] * m2[1]);
  for (int n = 0; n <= n_max; ++n)
    r.gaussian_targets.push_back(gaussian_moment(n).convert_to<double>());
  std::sort(z.begin(), z.end());
  r.ks_gaussian = ks_distance(z, normal_cdf);
  return r;
}

double mean_square_gap(const FluctuationSample& sample, Sign sign) {
  if (sample.degenerate)
    throw InvalidArgument("mean_square_gap is undefined for an interval of mass 0 or 1");
  if (sample.per_form.empty()) throw InvalidArgument("mean_square_gap needs a nonempty sample");
  double acc = 0;
  for (const auto& f : sample.per_form) {
    const double s = sign == Sign::plus ? f.s_plus : f.s_minus;
    const double g = f.N - sample.pi_x * sample.mu - s;
    acc += g * g;
  }
  acc /= static_cast<double>(sample.per_form.size());
  return acc / variance_scale(sample.pi_x, sample.mu);
}

}  // namespace stclt
