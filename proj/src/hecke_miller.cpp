#include <algorithm>
#include <string>

#include "hecke_backends.hpp"
#include "stclt/error.hpp"
#include "stclt/hecke.hpp"

namespace stclt::detail {

namespace {

using Poly = std::vector<Rational>;  // coefficients, lowest degree first

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Faddeev-LeVerrier; all intermediate values are integers.
Poly characteristic_polynomial(const std::vector<std::vector<BigInt>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<BigInt> c(n + 1);
  c[n] = 1;
  std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n));
  for (int step = 1; step <= n; ++step) {
    // M <- A M + c_{n-step+1} I
    std::vector<std::vector<BigInt>> next(n, std::vector<BigInt>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        BigInt s = 0;
        for (int l = 0; l < n; ++l) s += a[i][l] * m[l][j];
        next[i][j] = std::move(s);
      }
    for (int i = 0; i < n; ++i) next[i][i] += c[n - step + 1];
    m = std::move(next);
    BigInt tr = 0;
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) tr += a[i][l] * m[l][i];
    BigInt q, r;
    divide_qr(BigInt(-tr), BigInt(step), q, r);
    if (r != 0) throw ConsistencyError("characteristic polynomial is not integral");
    c[n - step] = q;
  }
  Poly p(n + 1);
  for (int i = 0; i <= n; ++i) p[i] = Rational(c[i]);
  return p;
}

Rational evaluate(const Poly& p, const Rational& x) {
  Rational v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Poly remainder(Poly a, const Poly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

std::vector<Poly> sturm_sequence(const Poly& p) {
  std::vector<Poly> seq{p, derivative(p)};
  while (seq.back().size() > 1) {
    Poly r = remainder(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(std::move(r));
  }
  return seq;
}

int sign_changes(const std::vector<Poly>& seq, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& p : seq) {
    const Rational v = evaluate(p, x);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

Rational cauchy_bound(const Poly& p) {
  Rational m = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) m = std::max(m, Rational(abs(p[i] / p.back())));
  return m + 1;
}

// Roots in (lo, hi] counted by Sturm; each returned interval holds exactly one.
void isolate(const std::vector<Poly>& seq, Rational lo, Rational hi, int count,
             std::vector<std::pair<Rational, Rational>>& out) {
  if (count == 0) return;
  if (count == 1) {
    out.emplace_back(lo, hi);
    return;
  }
  const Rational mid = (lo + hi) / 2;
  const int left = sign_changes(seq, lo) - sign_changes(seq, mid);
  isolate(seq, lo, mid, left, out);
  isolate(seq, mid, hi, count - left, out);
}

Rational refine(const Poly& p, Rational lo, Rational hi, int iterations) {
  if (evaluate(p, hi) == 0) return hi;
  int slo = evaluate(p, lo) > 0 ? 1 : -1;
  for (int it = 0; it < iterations; ++it) {
    const Rational mid = (lo + hi) / 2;
    const Rational v = evaluate(p, mid);
    if (v == 0) return mid;
    if ((v > 0 ? 1 : -1) == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

unsigned entry_bits(const std::vector<std::vector<BigInt>>& m) {
  unsigned bits = 0;
  for (const auto& row : m)
    for (const auto& v : row)
      if (v != 0) bits = std::max(bits, static_cast<unsigned>(msb(abs(v))) + 1);
  return bits;
}

HighReal to_high(const BigInt& v) { return HighReal(v.str()); }
HighReal to_high(const Rational& v) { return to_high(numerator(v)) / to_high(denominator(v)); }

// Solves (A - lambda I) v = 0 with v_1 = 1.
std::vector<HighReal> null_vector(const std::vector<std::vector<HighReal>>& a,
                                  const HighReal& lambda) {
  const int n = static_cast<int>(a.size());
  std::vector<HighReal> v(n);
  v[0] = 1;
  if (n == 1) return v;
  // Augmented rows [B_{:,1..n-1} | -B_{:,0}].
  std::vector<std::vector<HighReal>> rows(n, std::vector<HighReal>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < n; ++j) rows[i][j - 1] = a[i][j] - (i == j ? lambda : HighReal(0));
    rows[i][n - 1] = -(a[i][0] - (i == 0 ? lambda : HighReal(0)));
  }
  const int unknowns = n - 1;
  for (int col = 0; col < unknowns; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (abs(rows[r][col]) > abs(rows[piv][col])) piv = r;
    std::swap(rows[piv], rows[col]);
    if (rows[col][col] == 0) throw DegeneracyError("eigenvector is not unique");
    for (int r = col + 1; r < n; ++r) {
      const HighReal f = rows[r][col] / rows[col][col];
      for (int c = col; c < n; ++c) rows[r][c] -= f * rows[col][c];
    }
  }
  for (int i = unknowns - 1; i >= 0; --i) {
    HighReal s = rows[i][n - 1];
    for (int j = i + 1; j < unknowns; ++j) s -= rows[i][j] * v[j + 1];
    v[i + 1] = s / rows[i][i];
  }
  return v;
}

}  // namespace

RawEigenTable miller_eigen(int k, const std::vector<int>& primes, bool high_precision) {
  const int d = dim_cusp_forms(k);
  const long pmax = std::max<long>(primes.back(), 3);
  const CuspBasis basis = miller_basis(k, pmax * (d + 1) + 2);

  std::vector<HeckeMatrix> tp;
  for (int p : primes) tp.push_back(hecke_matrix(k, p, basis));
  const HeckeMatrix t2 = hecke_matrix(k, 2, basis);
  const HeckeMatrix t3 = hecke_matrix(k, 3, basis);

  std::vector<std::vector<BigInt>> sep;
  Poly charpoly;
  std::vector<Poly> sturm;
  bool found = false;
  for (int c = 0; c <= 16 && !found; ++c) {
    sep = t2.entries;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) sep[i][j] += c * t3.entries[i][j];
    charpoly = characteristic_polynomial(sep);
    sturm = sturm_sequence(charpoly);
    const Rational bound = cauchy_bound(charpoly);
    found = sign_changes(sturm, -bound) - sign_changes(sturm, bound) == d;
  }
  if (!found)
    throw DegeneracyError("no separating operator T2 + c T3 with c <= 16 in weight " +
                          std::to_string(k));

  unsigned bits = entry_bits(sep);
  for (const auto& m : tp) bits = std::max(bits, entry_bits(m.entries));
  const unsigned tier = high_precision ? 256 : 128;
  const unsigned work_bits = tier + bits + 32;

  const Rational bound = cauchy_bound(charpoly);
  std::vector<std::pair<Rational, Rational>> intervals;
  isolate(sturm, -bound, bound, d, intervals);

  ScopedPrecision prec(work_bits);
  std::vector<std::vector<HighReal>> a(d, std::vector<HighReal>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i][j] = to_high(sep[i][j]);

  RawEigenTable out;
  const int iterations = static_cast<int>(work_bits) + static_cast<int>(bits) + 64;
  for (const auto& [lo, hi] : intervals) {
    const HighReal lambda = to_high(refine(charpoly, lo, hi, iterations));
    const std::vector<HighReal> v = null_vector(a, lambda);
    HighReal vv = 0;
    for (const auto& x : v) vv += x * x;
    const HighReal vnorm = sqrt(vv);
    std::vector<double> row, res;
    for (std::size_t pi = 0; pi < primes.size(); ++pi) {
      const auto& m = tp[pi].entries;
      std::vector<HighReal> w(d);
      for (int i = 0; i < d; ++i) {
        HighReal s = 0;
        for (int j = 0; j < d; ++j)
          if (m[i][j] != 0) s += to_high(m[i][j]) * v[j];
        w[i] = s;
      }
      HighReal vw = 0;
      for (int i = 0; i < d; ++i) vw += v[i] * w[i];
      const HighReal lp = vw / vv;
      HighReal r2 = 0;
      for (int i = 0; i < d; ++i) r2 += (w[i] - lp * v[i]) * (w[i] - lp * v[i]);
      const HighReal scale = pow(sqrt(HighReal(primes[pi])), HighReal(k - 1));
      row.push_back(static_cast<double>(lp / scale));
      res.push_back(static_cast<double>(sqrt(r2) / (vnorm * scale)));
    }
    out.values.push_back(std::move(row));
    out.residuals.push_back(std::move(res));
  }
  return out;
}

}  // namespace stclt::detail
