#include "stclt/traceformula.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <string>

#include "stclt/error.hpp"
#include "stclt/qexp.hpp"

namespace stclt {

namespace {

// Reduced forms (a, b, c): |b| <= a <= c, b >= 0 if |b| = a or a = c.
// Weight 12 per class, 6 for multiples of x^2+y^2, 4 for multiples of
// x^2+xy+y^2.
int reduced_form_weight(long a, long b, long c) {
  if (a == c && b == 0) return 6;
  if (a == b && b == c) return 4;
  return 12;
}

std::vector<std::int64_t> build_hurwitz12(long limit) {
  std::vector<std::int64_t> h(static_cast<std::size_t>(limit) + 1, 0);
  for (long a = 1; 3 * a * a <= limit; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      const long c0 = (b < 0) ? a + 1 : a;
      for (long c = c0;; ++c) {
        const long disc = 4 * a * c - b * b;
        if (disc > limit) break;
        h[disc] += reduced_form_weight(a, b, c);
      }
    }
  }
  return h;
}

std::int64_t hurwitz12_direct(long n) {
  std::int64_t total = 0;
  for (long a = 1; 3 * a * a <= n; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      const long num = b * b + n;
      if (num % (4 * a) != 0) continue;
      const long c = num / (4 * a);
      if (c < a || (c == a && b < 0)) continue;
      total += reduced_form_weight(a, b, c);
    }
  }
  return total;
}

constexpr long kHurwitzTableCap = 50'000'000;

std::mutex hurwitz_mutex;
std::shared_ptr<const std::vector<std::int64_t>> hurwitz_cache;

}  // namespace

std::shared_ptr<const std::vector<std::int64_t>> hurwitz12_table(long limit) {
  {
    std::lock_guard<std::mutex> lock(hurwitz_mutex);
    if (hurwitz_cache && static_cast<long>(hurwitz_cache->size()) > limit) return hurwitz_cache;
  }
  if (limit > kHurwitzTableCap)
    throw ResourceError("Hurwitz table limit " + std::to_string(limit) + " exceeds cap");
  long target = std::max(limit, 1024L);
  {
    std::lock_guard<std::mutex> lock(hurwitz_mutex);
    if (hurwitz_cache)
      target = std::max(target, std::min(2 * static_cast<long>(hurwitz_cache->size()),
                                         kHurwitzTableCap));
  }
  auto fresh = std::make_shared<const std::vector<std::int64_t>>(build_hurwitz12(target));
  std::lock_guard<std::mutex> lock(hurwitz_mutex);
  if (!hurwitz_cache || hurwitz_cache->size() < fresh->size()) hurwitz_cache = fresh;
  return hurwitz_cache;
}

HurwitzValue hurwitz_class_number(long n) {
  if (n < 1) throw InvalidArgument("hurwitz_class_number needs n >= 1");
  if (n % 4 == 1 || n % 4 == 2) return {n, Rational(0)};
  std::int64_t twelve_h;
  if (n <= 1'000'000) {
    twelve_h = (*hurwitz12_table(n))[n];
  } else {
    twelve_h = hurwitz12_direct(n);
  }
  return {n, Rational(BigInt(twelve_h), BigInt(12))};
}

BigInt lucas_term(long t, long n, int k) {
  if (n < 1) throw InvalidArgument("lucas_term needs n >= 1");
  if (k < 2) throw InvalidArgument("lucas_term needs k >= 2");
  if (t * t >= 4 * n)
    throw InvalidArgument("lucas_term needs t^2 < 4n, got t=" + std::to_string(t) +
                          " n=" + std::to_string(n));
  BigInt prev = 1, cur = t;
  if (k == 2) return prev;
  for (int j = 2; j <= k - 2; ++j) {
    BigInt next = t * cur - n * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

TraceValue trace_unnormalized(int k, long n) {
  if (k < 2 || k % 2 != 0)
    throw InvalidArgument("trace_unnormalized needs even k >= 2, got " + std::to_string(k));
  if (n < 1) throw InvalidArgument("trace_unnormalized needs n >= 1");
  TraceValue tv;
  tv.weight = k;
  tv.n = n;

  const long r = isqrt(n);
  const bool square = r * r == n;
  if (square) tv.b1 = Rational(BigInt(k - 1), BigInt(12)) * Rational(ipow(n, k / 2 - 1));

  // G(-t) = G(t) for even k, so t >= 0 is summed once and t > 0 doubled.
  const long tmax = isqrt(4 * n - 1);
  auto table = hurwitz12_table(4 * n);
  BigInt sum12 = 0;
  for (long t = 0; t <= tmax; ++t) {
    const std::int64_t h12 = (*table)[4 * n - t * t];
    if (h12 == 0) continue;
    const BigInt g = lucas_term(t, n, k);
    sum12 += (t == 0 ? 1 : 2) * h12 * g;
  }
  tv.b2 = -Rational(sum12, BigInt(24));

  BigInt b3 = 0;
  for (long d = 1; d <= r; ++d) {
    if (n % d != 0) continue;
    BigInt term = ipow(d, static_cast<unsigned long>(k - 1));
    if (d * d == n) {
      tv.b3 -= Rational(term, BigInt(2));
    } else {
      b3 += term;
    }
  }
  tv.b3 -= Rational(b3);

  if (k == 2) {
    BigInt sigma = 0;
    for (long d : divisors(n)) sigma += d;
    tv.b4 = Rational(sigma);
  }
  tv.total = tv.b1 + tv.b2 + tv.b3 + tv.b4;
  if (denominator(tv.total) != 1)
    throw ConsistencyError("trace formula total is not an integer at k=" + std::to_string(k) +
                           " n=" + std::to_string(n) + ": " + tv.total.str());
  return tv;
}

std::map<long, BigInt> hecke_product_expansion(const std::vector<long>& m) {
  if (m.empty()) throw InvalidArgument("hecke_product_expansion needs a nonempty tuple");
  for (long v : m)
    if (v < 1) throw InvalidArgument("hecke_product_expansion entries must be >= 1");
  std::map<long, BigInt> acc{{m[0], BigInt(1)}};
  for (std::size_t i = 1; i < m.size(); ++i) {
    std::map<long, BigInt> next;
    for (const auto& [s, coeff] : acc) {
      for (long l = 0; l <= std::min(s, m[i]); ++l) next[s + m[i] - 2 * l] += coeff;
    }
    acc = std::move(next);
  }
  return acc;
}

HeckeTraceAlgebra::HeckeTraceAlgebra(int k) : k_(k), d_(dim_cusp_forms(k)) {
  if (d_ < 1) throw InvalidArgument("HeckeTraceAlgebra needs dim S_k >= 1");
  // Gram matrix G_ij = Tr(T_i T_j), inverted exactly.
  std::vector<std::vector<Rational>> a(d_, std::vector<Rational>(2 * d_));
  for (int i = 1; i <= d_; ++i) {
    for (int j = 1; j <= d_; ++j) {
      BigInt g = 0;
      for (long e : divisors(std::gcd(i, j)))
        g += ipow(e, static_cast<unsigned long>(k_ - 1)) * trace_of(static_cast<long>(i) * j / (e * e));
      a[i - 1][j - 1] = Rational(g);
    }
    a[i - 1][d_ + i - 1] = 1;
  }
  for (int col = 0; col < d_; ++col) {
    int piv = col;
    while (piv < d_ && a[piv][col] == 0) ++piv;
    if (piv == d_) throw ConsistencyError("trace-form Gram matrix is singular");
    std::swap(a[piv], a[col]);
    const Rational inv = 1 / a[col][col];
    for (auto& v : a[col]) v *= inv;
    for (int r = 0; r < d_; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (int c = col; c < 2 * d_; ++c) a[r][c] -= f * a[col][c];
    }
  }
  gram_inverse_.assign(d_, std::vector<Rational>(d_));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) gram_inverse_[i][j] = a[i][d_ + j];
  table_.resize(d_);
}

const BigInt& HeckeTraceAlgebra::trace_of(long n) {
  auto it = traces_.find(n);
  if (it != traces_.end()) return it->second;
  const TraceValue tv = trace_unnormalized(k_, n);
  return traces_.emplace(n, numerator(tv.total)).first->second;
}

HeckeTraceAlgebra::Element HeckeTraceAlgebra::basis(long n) {
  if (n < 1 || n > d_) throw InvalidArgument("basis index out of range");
  Element x(d_);
  x[n - 1] = 1;
  return x;
}

HeckeTraceAlgebra::Element HeckeTraceAlgebra::coordinates(long n) {
  if (n <= d_) return basis(n);
  std::vector<Rational> v(d_);
  for (int i = 1; i <= d_; ++i) {
    BigInt s = 0;
    for (long e : divisors(std::gcd(n, static_cast<long>(i))))
      s += ipow(e, static_cast<unsigned long>(k_ - 1)) * trace_of(n * i / (e * e));
    v[i - 1] = Rational(s);
  }
  Element x(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) x[i] += gram_inverse_[i][j] * v[j];
  return x;
}

const std::vector<HeckeTraceAlgebra::Element>& HeckeTraceAlgebra::table_row(int i) {
  auto& row = table_[i];
  if (!row.empty()) return row;
  row.resize(d_);
  const long a = i + 1;
  for (int j = 0; j < d_; ++j) {
    const long b = j + 1;
    Element acc(d_);
    for (long e : divisors(std::gcd(a, b))) {
      const BigInt w = ipow(e, static_cast<unsigned long>(k_ - 1));
      const Element c = coordinates(a * b / (e * e));
      for (int t = 0; t < d_; ++t) acc[t] += Rational(w) * c[t];
    }
    row[j] = std::move(acc);
  }
  return row;
}

HeckeTraceAlgebra::Element HeckeTraceAlgebra::multiply(const Element& x, const Element& y) {
  Element z(d_);
  for (int i = 0; i < d_; ++i) {
    if (x[i] == 0) continue;
    const auto& row = table_row(i);
    for (int j = 0; j < d_; ++j) {
      if (y[j] == 0) continue;
      const Rational w = x[i] * y[j];
      for (int t = 0; t < d_; ++t) z[t] += w * row[j][t];
    }
  }
  return z;
}

HeckeTraceAlgebra::Element HeckeTraceAlgebra::prime_power(long p, long m) {
  if (!is_prime(p)) throw InvalidArgument("prime_power needs a prime, got " + std::to_string(p));
  if (m < 0) throw InvalidArgument("prime_power needs m >= 0");
  auto& pw = powers_[p];
  if (pw.empty()) {
    pw.push_back(basis(1));
    pw.push_back(coordinates(p));
  }
  const Rational pk = Rational(ipow(p, static_cast<unsigned long>(k_ - 1)));
  while (static_cast<long>(pw.size()) <= m) {
    Element next = multiply(pw[1], pw.back());
    const Element& before = pw[pw.size() - 2];
    for (int t = 0; t < d_; ++t) next[t] -= pk * before[t];
    pw.push_back(std::move(next));
  }
  return pw[m];
}

BigInt HeckeTraceAlgebra::trace(const Element& x) {
  Rational s = 0;
  for (int j = 0; j < d_; ++j)
    if (x[j] != 0) s += x[j] * Rational(trace_of(j + 1));
  if (denominator(s) != 1)
    throw ConsistencyError("Hecke algebra trace is not an integer: " + s.str());
  return numerator(s);
}

BigInt HeckeTraceAlgebra::product_trace(const std::vector<PrimePower>& factors) {
  Element acc = basis(1);
  for (const auto& f : factors) acc = multiply(acc, prime_power(f.p, f.m));
  return trace(acc);
}

namespace {

constexpr long kDirectTraceLimit = 20'000;

void validate_factors(const std::vector<PrimePower>& factors) {
  std::set<long> seen;
  for (const auto& f : factors) {
    if (!is_prime(f.p))
      throw InvalidArgument("averaged_product factor " + std::to_string(f.p) + " is not prime");
    if (f.m < 0) throw InvalidArgument("averaged_product exponents must be >= 0");
    if (!seen.insert(f.p).second)
      throw InvalidArgument("averaged_product prime " + std::to_string(f.p) +
                            " repeated; merge exponents first");
  }
}

AveragedProduct finish(int k, int d, BigInt trace, const std::vector<PrimePower>& factors) {
  AveragedProduct out;
  out.trace = std::move(trace);
  out.dim = d;
  ScopedPrecision prec(256);
  HighReal scale = d;
  for (const auto& f : factors) {
    if (f.m == 0) continue;
    out.exponents[f.p] += f.m;
    scale *= pow(sqrt(HighReal(f.p)), HighReal(f.m) * (k - 1));
  }
  out.value = HighReal(out.trace) / scale;
  return out;
}

}  // namespace

AveragedProduct averaged_product(int k, const std::vector<PrimePower>& factors) {
  validate_factors(factors);
  const int d = dim_cusp_forms(k);
  if (d < 1) throw InvalidArgument("averaged_product needs dim S_k >= 1");
  BigInt n = 1;
  for (const auto& f : factors) n *= ipow(f.p, static_cast<unsigned long>(f.m));
  if (n <= kDirectTraceLimit) {
    const TraceValue tv = trace_unnormalized(k, static_cast<long>(n));
    return finish(k, d, numerator(tv.total), factors);
  }
  HeckeTraceAlgebra algebra(k);
  return finish(k, d, algebra.product_trace(factors), factors);
}

AveragedProduct averaged_product(HeckeTraceAlgebra& algebra,
                                 const std::vector<PrimePower>& factors) {
  validate_factors(factors);
  return finish(algebra.weight(), algebra.dim(), algebra.product_trace(factors), factors);
}

}  // namespace stclt
