#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "stclt/numeric.hpp"

namespace stclt {

struct HurwitzValue {
  long n = 0;
  Rational value;
};

// Weighted count of classes of positive definite forms of discriminant -n.
HurwitzValue hurwitz_class_number(long n);

// Shared snapshot of 12*H(m) for 0 <= m <= at least `limit` (entry 0 unused).
// The underlying table only grows; snapshots stay valid forever.
std::shared_ptr<const std::vector<std::int64_t>> hurwitz12_table(long limit);

// (rho^{k-1} - rhobar^{k-1}) / (rho - rhobar) for the roots of x^2 - t x + n.
BigInt lucas_term(long t, long n, int k);

struct TraceValue {
  int weight = 0;
  long n = 0;
  Rational total;
  Rational b1, b2, b3, b4;
};

// Trace of T_n on S_k(SL2(Z)) from the Eichler-Selberg formula, unnormalized.
TraceValue trace_unnormalized(int k, long n);

// Coefficients D(t) with prod_i X_{m_i} = sum_t D(t) X_t.
std::map<long, BigInt> hecke_product_expansion(const std::vector<long>& m);

struct PrimePower {
  long p = 0;
  long m = 0;
};

struct AveragedProduct {
  // sum_f lambda_f(N) with N = prod p_i^{m_i}.
  BigInt trace;
  // p -> m_i; the average is trace / (s_k * prod p^{m_i (k-1)/2}).
  std::map<long, long> exponents;
  int dim = 0;
  HighReal value;
};

// (1/s_k) sum_f prod_i a_f(p_i^{m_i}) exactly. Small N = prod p_i^{m_i}
// goes straight through trace_unnormalized(k, N); larger N through
// HeckeTraceAlgebra.
AveragedProduct averaged_product(int k, const std::vector<PrimePower>& factors);

class HeckeTraceAlgebra;
AveragedProduct averaged_product(HeckeTraceAlgebra& algebra,
                                 const std::vector<PrimePower>& factors);

// Exact traces of arbitrary products of T_n on S_k without evaluating the
// trace formula at large arguments. Elements are coordinate vectors in the
// basis T_1..T_d of the Hecke algebra; the Gram matrix of the trace form
// in that basis comes from the trace formula at arguments <= d^3.
class HeckeTraceAlgebra {
 public:
  using Element = std::vector<Rational>;

  explicit HeckeTraceAlgebra(int k);

  int weight() const noexcept { return k_; }
  int dim() const noexcept { return d_; }

  // Exact trace of T_n from the trace formula, memoized.
  const BigInt& trace_of(long n);
  Element basis(long n);  // T_n for n <= d
  Element multiply(const Element& x, const Element& y);
  // T_{p^m} for a prime p.
  Element prime_power(long p, long m);
  BigInt trace(const Element& x);

    // Tr(T_N) for N = prod p_i^{m_i}, distinct primes.
  BigInt product_trace(const std::vector<PrimePower>& factors);

 private:
  Element coordinates(long n);
  const std::vector<Element>& table_row(int i);

  int k_;
  int d_;
  std::map<long, BigInt> traces_;
  std::vector<std::vector<Rational>> gram_inverse_;
  // table_[i][j] = coordinates of T_{i+1} T_{j+1}, filled row by row.
  std::vector<std::vector<Element>> table_;
  std::map<long, std::vector<Element>> powers_;
};

}  // namespace stclt
