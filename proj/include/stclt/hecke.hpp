#pragma once

#include <vector>

#include "stclt/numeric.hpp"
#include "stclt/qexp.hpp"

namespace stclt {

struct HeckeMatrix {
  int weight = 0;
  long n = 0;
  // entries[i][j]: coefficient of basis form i in T_n applied to form j.
  std::vector<std::vector<BigInt>> entries;

  int dim() const noexcept { return static_cast<int>(entries.size()); }
  BigInt trace() const;
};

// T_n on the Miller basis: (T_n f)(m) = sum_{e | (m,n)} e^{k-1} f(mn/e^2).
HeckeMatrix hecke_matrix(int k, long n, const CuspBasis& basis);

struct EigenvalueTable {
  int weight = 0;
  std::vector<int> primes;
  // values[f][i] = a_f(primes[i]); rows sorted by a_f(2), then a_f(3).
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> residuals;

  int dim() const noexcept { return static_cast<int>(values.size()); }
  // Index of p in primes, or -1.
  int prime_index(int p) const;
  double max_residual() const;
};

enum class EigenBackend {
  automatic,   // miller for k <= 60, trace_form above
  miller,      // exact Miller-basis matrices, separating operator, Rayleigh quotients
  trace_form,  // Hecke algebra rebuilt from normalized traces
};

struct EigenOptions {
  EigenBackend backend = EigenBackend::automatic;
  // Start directly at the escalated precision tier.
  bool high_precision = false;
};

inline constexpr int kMillerBackendMaxWeight = 60;
inline constexpr double kDeligneTolerance = 1e-6;
inline constexpr double kResidualThreshold = 1e-6;

EigenvalueTable eigen_system(int k, long pmax, const EigenOptions& options = {});

// |sum_f a_f(p) - Tr T_p / p^{(k-1)/2}| evaluated in high precision.
double trace_consistency_gap(const EigenvalueTable& table, int p);

// a_f(p^m) = X_m(a_f(p)), X_0 = 1, X_1 = x, X_m = x X_{m-1} - X_{m-2}.
template <class Real>
Real prime_power_eigenvalue(const Real& a, long m) {
  if (m < 0) return Real(0);
  Real prev = 1;
  if (m == 0) return prev;
  Real cur = a;
  for (long j = 2; j <= m; ++j) {
    Real next = a * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// 2 cos(m theta) for a = 2 cos(theta), m != 0.
template <class Real>
Real cosine_transform(const Real& a, long m) {
  if (m < 0) m = -m;
  if (m == 0) return Real(2);
  if (m == 1) return a;
  // T-type recurrence: c_0 = 2, c_1 = a, c_j = a c_{j-1} - c_{j-2}.
  Real prev = 2;
  Real cur = a;
  for (long j = 2; j <= m; ++j) {
    Real next = a * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace stclt
