#include <mpfr.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "hecke_backends.hpp"
#include "stclt/detail/symeig.hpp"
#include "stclt/error.hpp"
#include "stclt/numeric.hpp"
#include "stclt/qexp.hpp"
#include "stclt/traceformula.hpp"

namespace stclt::detail {

namespace {

// 256-bit significand with inline storage.
using Fixed256 = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<78, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

// tau(n) = sum_f a_f(n) for every n with mask[n] set and not yet known.
// Terms are the trace formula divided by n^{(k-1)/2}:
//   (k-1)/12 n^{-1/2} [n square]
//   - sum_t H(4n - t^2) sin((k-1) theta) / sqrt(4n - t^2),  2 sqrt(n) cos theta = t
//   - sum_{d | n, d < sqrt n} (d^2/n)^{(k-1)/2} - 1/2 [n square]
template <class Real>
Real elliptic_sum(int k, long n, const std::vector<std::int64_t>& h12) {
  using std::acos;
  using std::sin;
  using std::sqrt;
  const Real inv2sn = 1 / (2 * sqrt(Real(n)));
  const Real km1 = k - 1;
  Real elliptic = 0;
  const long tmax = isqrt(4 * n - 1);
  for (long t = 0; t <= tmax; ++t) {
    const std::int64_t h = h12[4 * n - t * t];
    if (h == 0) continue;
    const Real theta = acos(Real(t) * inv2sn);
    Real term = Real(h) * sin(km1 * theta) / sqrt(Real(4 * n - t * t));
    if (t != 0) term *= 2;
    elliptic += term;
  }
  return elliptic;
}

// Same sum with raw MPFR: sin((k-1) theta) = Im z^{k-1}, z = (t + i s) / (2 sqrt n),
// s = sqrt(4n - t^2), by binary powering; no inverse trigonometric calls.
template <>
Fixed256 elliptic_sum<Fixed256>(int k, long n, const std::vector<std::int64_t>& h12) {
  constexpr mpfr_prec_t bits = 256;
  mpfr_t inv2sn, s, x, y, re, im, a, b, c, acc;
  mpfr_inits2(bits, inv2sn, s, x, y, re, im, a, b, c, acc, static_cast<mpfr_ptr>(nullptr));
  mpfr_sqrt_ui(inv2sn, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_mul_2ui(inv2sn, inv2sn, 1, MPFR_RNDN);
  mpfr_ui_div(inv2sn, 1, inv2sn, MPFR_RNDN);
  mpfr_set_ui(acc, 0, MPFR_RNDN);
  const unsigned long e = static_cast<unsigned long>(k - 1);
  int top = 63;
  while (!((e >> top) & 1UL)) --top;
  const long tmax = isqrt(4 * n - 1);
  for (long t = 0; t <= tmax; ++t) {
    const std::int64_t h = h12[4 * n - t * t];
    if (h == 0) continue;
    mpfr_sqrt_ui(s, static_cast<unsigned long>(4 * n - t * t), MPFR_RNDN);
    mpfr_mul_ui(x, inv2sn, static_cast<unsigned long>(t), MPFR_RNDN);
    mpfr_mul(y, s, inv2sn, MPFR_RNDN);
    mpfr_set(re, x, MPFR_RNDN);
    mpfr_set(im, y, MPFR_RNDN);
    for (int bit = top - 1; bit >= 0; --bit) {
      // (re + i im)^2 = (re - im)(re + im) + 2 i re im
      mpfr_sub(a, re, im, MPFR_RNDN);
      mpfr_add(b, re, im, MPFR_RNDN);
      mpfr_mul(c, re, im, MPFR_RNDN);
      mpfr_mul(re, a, b, MPFR_RNDN);
      mpfr_mul_2ui(im, c, 1, MPFR_RNDN);
      if ((e >> bit) & 1UL) {
        // (re + i im)(x + i y)
        mpfr_mul(a, re, x, MPFR_RNDN);
        mpfr_mul(b, im, y, MPFR_RNDN);
        mpfr_mul(c, re, y, MPFR_RNDN);
        mpfr_mul(im, im, x, MPFR_RNDN);
        mpfr_add(im, im, c, MPFR_RNDN);
        mpfr_sub(re, a, b, MPFR_RNDN);
      }
    }
    mpfr_div(a, im, s, MPFR_RNDN);
    mpfr_mul_ui(a, a, static_cast<unsigned long>(t == 0 ? h : 2 * h), MPFR_RNDN);
    mpfr_add(acc, acc, a, MPFR_RNDN);
  }
  Fixed256 out;
  mpfr_set(out.backend().data(), acc, MPFR_RNDN);
  mpfr_clears(inv2sn, s, x, y, re, im, a, b, c, acc, static_cast<mpfr_ptr>(nullptr));
  return out;
}

template <class Real>
void fill_traces(int k, const std::vector<char>& mask, std::vector<char>& known,
                 std::vector<Real>& tau) {
  using std::pow;
  using std::sqrt;
  const long n_max = static_cast<long>(mask.size()) - 1;
  tau.resize(mask.size());
  known.resize(mask.size(), 0);
  const auto h12 = hurwitz12_table(4 * n_max);
  const Real km1 = k - 1;
  for (long n = 1; n <= n_max; ++n) {
    if (!mask[n] || known[n]) continue;
    const Real sn = sqrt(Real(n));
    const long r = isqrt(n);
    Real s = 0;
    if (r * r == n) s += km1 / 12 / sn - Real(1) / 2;
    s -= elliptic_sum<Real>(k, n, *h12) / 12;
    for (long d = 1; d * d < n; ++d)
      if (n % d == 0) s -= pow(Real(d) / sn, k - 1);
    tau[n] = s;
    known[n] = 1;
  }
}

template <class Real>
RawEigenTable solve(int k, const std::vector<int>& primes, const Real& eps) {
  using std::abs;
  using std::sqrt;
  const int d = dim_cusp_forms(k);
  const long dd = d;
  std::vector<char> mask(static_cast<std::size_t>(std::max(3 * dd * dd, primes.back() * dd)) + 1, 0);
  std::vector<char> known;
  std::vector<Real> tau;

  // Gram entries, the T2 pencil and rows for primes beyond d.
  for (long i = 1; i <= dd; ++i)
    for (long j = 1; j <= dd; ++j)
      for (long e : divisors(std::gcd(i, j))) {
        const long m = i * j / (e * e);
        mask[m] = 1;
        for (long e2 : divisors(std::gcd(2L, m))) mask[2 * m / (e2 * e2)] = 1;
      }
  for (int p : primes)
    if (p > d)
      for (long j = 1; j <= dd; ++j) mask[p * j] = 1;
  fill_traces<Real>(k, mask, known, tau);

  auto pencil = [&](long q) {
    SquareMatrix<Real> m(d);
    for (long i = 1; i <= dd; ++i)
      for (long j = 1; j <= i; ++j) {
        Real v = 0;
        for (long e : divisors(std::gcd(i, j))) {
          const long mm = i * j / (e * e);
          if (q == 1) {
            v += tau[mm];
          } else {
            for (long e2 : divisors(std::gcd(q, mm))) v += tau[q * mm / (e2 * e2)];
          }
        }
        m(i - 1, j - 1) = m(j - 1, i - 1) = v;
      }
    return m;
  };

  const SquareMatrix<Real> gram = pencil(1);
  const SquareMatrix<Real> k2 = pencil(2);
  SquareMatrix<Real> k3;

  SymmetricEigen<Real> eig;
  SquareMatrix<Real> sep = k2;
  bool found = false;
  int c_used = 0;
  for (int c = 0; c <= 16 && !found; ++c) {
    c_used = c;
    if (c == 1) {
      for (long i = 1; i <= dd; ++i)
        for (long j = 1; j <= dd; ++j)
          for (long e : divisors(std::gcd(i, j))) {
            const long m = i * j / (e * e);
            for (long e2 : divisors(std::gcd(3L, m))) mask[3 * m / (e2 * e2)] = 1;
          }
      fill_traces<Real>(k, mask, known, tau);
      k3 = pencil(3);
    }
    if (c >= 1)
      for (std::size_t i = 0; i < sep.a.size(); ++i) sep.a[i] = k2.a[i] + c * k3.a[i];
    eig = generalized_symmetric_eigen(sep, gram, eps);
    Real scale = 1;
    for (const auto& v : eig.values) scale = std::max(scale, Real(abs(v)));
    found = true;
    for (int i = 1; i < d; ++i)
      if (eig.values[i] - eig.values[i - 1] <= 1e6 * eps * scale) found = false;
  }
  if (!found)
    throw DegeneracyError("no separating operator T2 + c T3 with c <= 16 in weight " +
                          std::to_string(k));

  RawEigenTable out;
  const std::size_t np = primes.size();
  for (int f = 0; f < d; ++f) {
    std::vector<Real> c(d), w(d, Real(0)), kc(d, Real(0));
    for (int j = 0; j < d; ++j) c[j] = eig.vectors(j, f);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        w[i] += gram(i, j) * c[j];
        kc[i] += sep(i, j) * c[j];
      }
    // a_f(n) = w_n / w_1 for n <= d.
    std::vector<Real> a(d + 1);
    for (int i = 0; i < d; ++i) a[i + 1] = w[i] / w[0];

    Real r2 = 0, w2 = 0;
    for (int i = 0; i < d; ++i) {
      const Real r = kc[i] - eig.values[f] * w[i];
      r2 += r * r;
      w2 += w[i] * w[i];
    }
    Real sep_residual = sqrt(r2 / w2);
    // The separating eigenvalue must match the coefficients it came from.
    if (d >= 3 || (d == 2 && c_used == 0)) {
      const Real combo = a[2] + (c_used ? c_used * a[3] : Real(0));
      sep_residual = std::max(sep_residual, Real(abs(combo - eig.values[f])));
    }

    std::vector<double> row(np), res(np);
    for (std::size_t pi = 0; pi < np; ++pi) {
      const long p = primes[pi];
      Real ap;
      if (p <= d) {
        ap = a[p];
      } else {
        Real s = 0;
        for (long j = 1; j <= dd; ++j) s += tau[p * j] * c[j - 1];
        ap = s / w[0];
      }
      Real defect = sep_residual;
      for (long i = 1; p * i <= dd; ++i) {
        Real rhs = a[p * i];
        if (i % p == 0) rhs += a[i / p];
        defect = std::max(defect, Real(abs(ap * a[i] - rhs)));
      }
      row[pi] = static_cast<double>(ap);
      res[pi] = static_cast<double>(defect);
    }
    out.values.push_back(std::move(row));
    out.residuals.push_back(std::move(res));
  }
  return out;
}

}  // namespace

RawEigenTable trace_form_eigen(int k, const std::vector<int>& primes, bool high_precision) {
  // Past this dimension binary128 traces are not accurate enough for the
  // Gram matrix of T_1..T_d, so the first tier would only waste time.
  constexpr int kQuadMaxDim = 200;
  if (!high_precision && dim_cusp_forms(k) <= kQuadMaxDim)
    return solve<Quad>(k, primes, std::numeric_limits<Quad>::epsilon());
  return solve<Fixed256>(k, primes, std::numeric_limits<Fixed256>::epsilon());
}

}  // namespace stclt::detail
