#pragma once

#include <span>
#include <vector>

#include "stclt/numeric.hpp"

namespace stclt {

// Truncated q-series sum_{n < prec} c_n q^n with exact integer coefficients.
// Arithmetic never extends precision: results are known to the smaller of
// the operand precisions.
class QExpansion {
 public:
  QExpansion() = default;
  // weight 0 marks a generic series.
  QExpansion(int weight, std::vector<BigInt> coeffs);

  static QExpansion one(int prec);

  int weight() const noexcept { return weight_; }
  long prec() const noexcept { return static_cast<long>(coeffs_.size()); }
  std::span<const BigInt> coeffs() const noexcept { return coeffs_; }
  const BigInt& operator[](long n) const;

  QExpansion truncated(long prec) const;
  QExpansion pow(unsigned exponent) const;
  // Divides every coefficient by d; throws ConsistencyError if any is not
  // divisible.
  QExpansion divided_exact(const BigInt& d) const;

  friend QExpansion operator+(const QExpansion& a, const QExpansion& b);
  friend QExpansion operator-(const QExpansion& a, const QExpansion& b);
  friend QExpansion operator*(const QExpansion& a, const QExpansion& b);
  friend QExpansion operator*(const BigInt& s, const QExpansion& a);
  friend bool operator==(const QExpansion& a, const QExpansion& b);

 private:
  int weight_ = 0;
  std::vector<BigInt> coeffs_;
};

struct CuspBasis {
  int weight = 0;
  long prec = 0;
  // forms[i] = q^{i+1} + O(q^{d+1}) with zero coefficients at the other
  // leading positions.
  std::vector<QExpansion> forms;

  int dim() const noexcept { return static_cast<int>(forms.size()); }
};

// Normalized E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n.
QExpansion eisenstein_series(int weight, long prec);

// Delta = (E4^3 - E6^2) / 1728.
QExpansion delta(long prec);

// dim S_k(SL2(Z)).
int dim_cusp_forms(int k);

// Victor Miller basis of S_k built from Delta^j E4^a E6^b (minimal b) and
// integral back-substitution.
CuspBasis miller_basis(int k, long prec);

// sigma_e(n) for 0 <= n < limit (entry 0 is unused and zero).
std::vector<BigInt> divisor_sigma_table(long limit, unsigned e);

}  // namespace stclt
