#include "stclt/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hecke_backends.hpp"
#include "stclt/error.hpp"
#include "stclt/traceformula.hpp"

namespace stclt {

BigInt HeckeMatrix::trace() const {
  BigInt t = 0;
  for (int i = 0; i < dim(); ++i) t += entries[i][i];
  return t;
}

HeckeMatrix hecke_matrix(int k, long n, const CuspBasis& basis) {
  if (n < 1) throw InvalidArgument("hecke_matrix needs n >= 1");
  if (basis.weight != k)
    throw InvalidArgument("hecke_matrix basis has weight " + std::to_string(basis.weight) +
                          ", expected " + std::to_string(k));
  const int d = basis.dim();
  const long required = n * (d + 1) + 1;
  if (basis.prec < required)
    throw PrecisionError("hecke_matrix T_" + std::to_string(n) + " in weight " +
                             std::to_string(k) + " needs more q-expansion terms",
                         required);
  HeckeMatrix h;
  h.weight = k;
  h.n = n;
  h.entries.assign(d, std::vector<BigInt>(d));
  std::vector<std::pair<long, BigInt>> weights;
  for (long e : divisors(n)) weights.emplace_back(e, ipow(e, static_cast<unsigned long>(k - 1)));
  // Coordinates in an echelon basis are the coefficients at q^1..q^d.
  for (int j = 0; j < d; ++j) {
    const QExpansion& f = basis.forms[j];
    for (long m = 1; m <= d; ++m) {
      BigInt s = 0;
      for (const auto& [e, ek] : weights) {
        if (m % e != 0) continue;
        s += ek * f[m * n / (e * e)];
      }
      h.entries[m - 1][j] = std::move(s);
    }
  }
  return h;
}

int EigenvalueTable::prime_index(int p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) return -1;
  return static_cast<int>(it - primes.begin());
}

double EigenvalueTable::max_residual() const {
  double r = 0;
  for (const auto& row : residuals)
    for (double v : row) r = std::max(r, v);
  return r;
}

namespace {

bool table_acceptable(const detail::RawEigenTable& raw) {
  for (std::size_t f = 0; f < raw.values.size(); ++f) {
    for (std::size_t i = 0; i < raw.values[f].size(); ++i) {
      const double a = raw.values[f][i];
      if (!std::isfinite(a) || std::abs(a) > 2 + kDeligneTolerance) return false;
      if (!(raw.residuals[f][i] <= kResidualThreshold)) return false;
    }
  }
  return true;
}

}  // namespace

EigenvalueTable eigen_system(int k, long pmax, const EigenOptions& options) {
  if (k < 0 || k % 2 != 0) throw InvalidArgument("eigen_system needs an even weight");
  if (pmax < 2) throw InvalidArgument("eigen_system needs pmax >= 2");
  EigenvalueTable table;
  table.weight = k;
  table.primes = primes_up_to(pmax);
  const int d = dim_cusp_forms(k);
  if (d == 0) return table;

  // 2 and 3 are always computed because they define the row order.
  std::vector<int> work_primes = primes_up_to(std::max(pmax, 3L));
  EigenBackend backend = options.backend;
  if (backend == EigenBackend::automatic)
    backend = k <= kMillerBackendMaxWeight ? EigenBackend::miller : EigenBackend::trace_form;
  auto run = [&](bool high) {
    return backend == EigenBackend::miller ? detail::miller_eigen(k, work_primes, high)
                                           : detail::trace_form_eigen(k, work_primes, high);
  };

  detail::RawEigenTable raw;
  bool ok = false;
  std::string failure;
  for (bool high : {false, true}) {
    if (!high && options.high_precision) continue;
    try {
      raw = run(high);
      ok = table_acceptable(raw);
      if (!ok) failure = "residual or Deligne bound check failed";
    } catch (const DegeneracyError& e) {
      if (high) throw;
      failure = e.what();
    }
    if (ok) break;
  }
  if (!ok)
    throw NumericalError("eigen_system(k=" + std::to_string(k) + ", pmax=" +
                         std::to_string(pmax) + ") failed after precision escalation: " +
                         failure);

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (raw.values[x][0] != raw.values[y][0]) return raw.values[x][0] < raw.values[y][0];
    return raw.values[x][1] < raw.values[y][1];
  });
  const std::size_t np = table.primes.size();
  for (int f : order) {
    table.values.emplace_back(raw.values[f].begin(), raw.values[f].begin() + np);
    table.residuals.emplace_back(raw.residuals[f].begin(), raw.residuals[f].begin() + np);
  }
  return table;
}

double trace_consistency_gap(const EigenvalueTable& table, int p) {
  const int idx = table.prime_index(p);
  if (idx < 0) throw PreconditionError("prime " + std::to_string(p) + " not in table");
  const TraceValue tv = trace_unnormalized(table.weight, p);
  ScopedPrecision prec(256);
  HighReal exact = HighReal(numerator(tv.total)) /
                   pow(sqrt(HighReal(p)), HighReal(table.weight - 1));
  HighReal sum = 0;
  for (const auto& row : table.values) sum += row[idx];
  return static_cast<double>(abs(sum - exact));
}

}  // namespace stclt
