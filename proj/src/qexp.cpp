#include "stclt/qexp.hpp"

#include <algorithm>
#include <string>

#include "stclt/error.hpp"

namespace stclt {

QExpansion::QExpansion(int weight, std::vector<BigInt> coeffs)
    : weight_(weight), coeffs_(std::move(coeffs)) {}

QExpansion QExpansion::one(int prec) {
  std::vector<BigInt> c(static_cast<std::size_t>(prec));
  if (prec > 0) c[0] = 1;
  return QExpansion(0, std::move(c));
}

const BigInt& QExpansion::operator[](long n) const {
  if (n < 0 || n >= prec())
    throw InvalidArgument("q-expansion index " + std::to_string(n) +
                          " outside known precision " + std::to_string(prec()));
  return coeffs_[static_cast<std::size_t>(n)];
}

QExpansion QExpansion::truncated(long prec) const {
  if (prec > this->prec())
    throw PrecisionError("cannot extend q-expansion precision", prec);
  return QExpansion(weight_, {coeffs_.begin(), coeffs_.begin() + prec});
}

namespace {

int sum_weight(const QExpansion& a, const QExpansion& b) {
  return a.weight() == b.weight() ? a.weight() : 0;
}

int product_weight(const QExpansion& a, const QExpansion& b) {
  if (a.weight() == 0 && b.weight() == 0) return 0;
  return a.weight() + b.weight();
}

}  // namespace

QExpansion operator+(const QExpansion& a, const QExpansion& b) {
  const long p = std::min(a.prec(), b.prec());
  std::vector<BigInt> c(static_cast<std::size_t>(p));
  for (long i = 0; i < p; ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
  return QExpansion(sum_weight(a, b), std::move(c));
}

QExpansion operator-(const QExpansion& a, const QExpansion& b) {
  const long p = std::min(a.prec(), b.prec());
  std::vector<BigInt> c(static_cast<std::size_t>(p));
  for (long i = 0; i < p; ++i) c[i] = a.coeffs_[i] - b.coeffs_[i];
  return QExpansion(sum_weight(a, b), std::move(c));
}

QExpansion operator*(const QExpansion& a, const QExpansion& b) {
  const long p = std::min(a.prec(), b.prec());
  std::vector<BigInt> c(static_cast<std::size_t>(p));
  for (long i = 0; i < p; ++i) {
    if (a.coeffs_[i] == 0) continue;
    const BigInt& ai = a.coeffs_[i];
    for (long j = 0; i + j < p; ++j) {
      if (b.coeffs_[j] == 0) continue;
      c[i + j] += ai * b.coeffs_[j];
    }
  }
  return QExpansion(product_weight(a, b), std::move(c));
}

QExpansion operator*(const BigInt& s, const QExpansion& a) {
  std::vector<BigInt> c(a.coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = s * a.coeffs_[i];
  return QExpansion(a.weight_, std::move(c));
}

bool operator==(const QExpansion& a, const QExpansion& b) {
  return a.weight_ == b.weight_ && a.coeffs_ == b.coeffs_;
}

QExpansion QExpansion::pow(unsigned exponent) const {
  QExpansion result = one(static_cast<int>(prec()));
  QExpansion base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

QExpansion QExpansion::divided_exact(const BigInt& d) const {
  std::vector<BigInt> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    BigInt q, r;
    divide_qr(coeffs_[i], d, q, r);
    if (r != 0)
      throw ConsistencyError("coefficient " + std::to_string(i) + " not divisible by " +
                             d.str());
    c[i] = q;
  }
  return QExpansion(weight_, std::move(c));
}

std::vector<BigInt> divisor_sigma_table(long limit, unsigned e) {
  std::vector<BigInt> sigma(static_cast<std::size_t>(std::max(limit, 0L)));
  for (long d = 1; d < limit; ++d) {
    const BigInt de = ipow(d, e);
    for (long m = d; m < limit; m += d) sigma[m] += de;
  }
  return sigma;
}

QExpansion eisenstein_series(int weight, long prec) {
  if (weight != 4 && weight != 6)
    throw InvalidArgument("eisenstein_series supports weight 4 or 6, got " +
                          std::to_string(weight));
  if (prec < 1) throw InvalidArgument("eisenstein_series needs prec >= 1");
  const unsigned e = weight == 4 ? 3 : 5;
  const long scale = weight == 4 ? 240 : -504;
  auto sigma = divisor_sigma_table(prec, e);
  std::vector<BigInt> c(static_cast<std::size_t>(prec));
  c[0] = 1;
  for (long n = 1; n < prec; ++n) c[n] = scale * sigma[n];
  return QExpansion(weight, std::move(c));
}

QExpansion delta(long prec) {
  if (prec < 1) throw InvalidArgument("delta needs prec >= 1");
  const QExpansion e4 = eisenstein_series(4, prec);
  const QExpansion e6 = eisenstein_series(6, prec);
  QExpansion d = (e4 * e4 * e4 - e6 * e6).divided_exact(BigInt(1728));
  return QExpansion(12, {d.coeffs().begin(), d.coeffs().end()});
}

int dim_cusp_forms(int k) {
  if (k < 0 || k % 2 != 0)
    throw InvalidArgument("dim_cusp_forms needs a nonnegative even weight, got " +
                          std::to_string(k));
  if (k < 12) return 0;
  return k % 12 == 2 ? k / 12 - 1 : k / 12;
}

CuspBasis miller_basis(int k, long prec) {
  const int d = dim_cusp_forms(k);
  CuspBasis basis{k, prec, {}};
  if (d == 0) return basis;
  if (prec < d + 1)
    throw PrecisionError("Miller basis of weight " + std::to_string(k) +
                             " cannot be echelonized",
                         d + 1);

  const QExpansion e4 = eisenstein_series(4, prec);
  const QExpansion e6 = eisenstein_series(6, prec);
  const QExpansion dl = delta(prec);

  // 4a + 6b = k - 12j with b in {0, 1}; a drops by 3 as j grows by 1, so
  // the E4 powers are built from the smallest exponent upward.
  std::vector<int> a_of(d + 1), b_of(d + 1);
  for (int j = 1; j <= d; ++j) {
    const int rem = k - 12 * j;
    b_of[j] = rem % 4 == 0 ? 0 : 1;
    a_of[j] = (rem - 6 * b_of[j]) / 4;
  }
  std::vector<QExpansion> e4_pow(d + 1);
  e4_pow[d] = e4.pow(static_cast<unsigned>(a_of[d]));
  const QExpansion e4_cubed = e4 * e4 * e4;
  for (int j = d - 1; j >= 1; --j) e4_pow[j] = e4_pow[j + 1] * e4_cubed;

  std::vector<std::vector<BigInt>> rows(d);
  QExpansion delta_pow = QExpansion::one(static_cast<int>(prec));
  for (int j = 1; j <= d; ++j) {
    delta_pow = delta_pow * dl;
    QExpansion g = delta_pow * e4_pow[j];
    if (b_of[j] == 1) g = g * e6;
    rows[j - 1].assign(g.coeffs().begin(), g.coeffs().end());
  }

  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      const BigInt c = rows[i][j + 1];
      if (c == 0) continue;
      for (long n = j + 1; n < prec; ++n) rows[i][n] -= c * rows[j][n];
    }
  }
  for (auto& r : rows) basis.forms.emplace_back(k, std::move(r));
  return basis;
}

}  // namespace stclt
