#pragma once

// Dense symmetric (generalized) eigensolver templated on the scalar type so
// that it runs in binary128 and MPFR. Householder tridiagonalization followed
// by implicit QL, as in EISPACK tred2/tql2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "stclt/error.hpp"

namespace stclt::detail {

template <class Real>
struct SquareMatrix {
  int n = 0;
  std::vector<Real> a;

  SquareMatrix() = default;
  explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, Real(0)) {}
  Real& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const Real& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

template <class Real>
Real hypot_safe(const Real& x, const Real& y) {
  using std::abs;
  using std::sqrt;
  const Real ax = abs(x), ay = abs(y);
  if (ax > ay) {
    const Real r = ay / ax;
    return ax * sqrt(1 + r * r);
  }
  if (ay == 0) return Real(0);
  const Real r = ax / ay;
  return ay * sqrt(1 + r * r);
}

template <class Real>
struct SymmetricEigen {
  std::vector<Real> values;  // ascending
  SquareMatrix<Real> vectors;  // column j belongs to values[j]
};

// Eigen-decomposition of a symmetric matrix. Only the lower triangle is read.
template <class Real>
SymmetricEigen<Real> symmetric_eigen(const SquareMatrix<Real>& input, const Real& eps) {
  using std::abs;
  using std::sqrt;
  const int n = input.n;
  SquareMatrix<Real> V(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) V(i, j) = V(j, i) = input(i, j);
  std::vector<Real> d(n), e(n);
  if (n == 0) return {};

  for (int j = 0; j < n; ++j) d[j] = V(n - 1, j);
  for (int i = n - 1; i > 0; --i) {
    Real scale = 0, h = 0;
    for (int k = 0; k < i; ++k) scale += abs(d[k]);
    if (scale == 0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0;
        V(j, i) = 0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      Real f = d[i - 1];
      Real g = sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0;
      for (int j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const Real hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0;
      }
    }
    d[i] = h;
  }
  for (int i = 0; i < n - 1; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1;
    const Real h = d[i + 1];
    if (h != 0) {
      for (int k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (int j = 0; j <= i; ++j) {
        Real g = 0;
        for (int k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (int k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (int k = 0; k <= i; ++k) V(k, i + 1) = 0;
  }
  for (int j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0;
  }
  V(n - 1, n - 1) = 1;
  e[0] = 0;

  // Implicit QL on the tridiagonal (d, e).
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;
  Real f = 0, tst1 = 0;
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, Real(abs(d[l]) + abs(e[l])));
    int m = l;
    while (m < n) {
      if (abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 200) throw NumericalError("QL iteration did not converge");
        Real g = d[l];
        Real p = (d[l + 1] - g) / (2 * e[l]);
        Real r = hypot_safe(p, Real(1));
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const Real dl1 = d[l + 1];
        Real h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        Real c = 1, c2 = c, c3 = c;
        const Real el1 = e[l + 1];
        Real s = 0, s2 = 0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = hypot_safe(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            h = V(k, i + 1);
            V(k, i + 1) = s * V(k, i) + c * h;
            V(k, i) = c * V(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (abs(e[l]) > eps * tst1);
    }
    d[l] = d[l] + f;
    e[l] = 0;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
  SymmetricEigen<Real> out;
  out.values.resize(n);
  out.vectors = SquareMatrix<Real>(n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (int i = 0; i < n; ++i) out.vectors(i, j) = V(i, order[j]);
  }
  return out;
}

// Solves K c = lambda G c for symmetric K and symmetric positive definite G.
// Columns of `vectors` are the c, normalized so that c^T G c = 1.
template <class Real>
SymmetricEigen<Real> generalized_symmetric_eigen(const SquareMatrix<Real>& K,
                                                 const SquareMatrix<Real>& G, const Real& eps) {
  using std::sqrt;
  const int n = G.n;
  // Diagonal equilibration D^{-1/2} G D^{-1/2} before the Cholesky factor.
  std::vector<Real> s(n);
  for (int i = 0; i < n; ++i) {
    if (!(G(i, i) > 0)) throw NumericalError("Gram matrix is not positive definite");
    s[i] = 1 / sqrt(G(i, i));
  }
  SquareMatrix<Real> L(n);
  for (int j = 0; j < n; ++j) {
    Real diag = G(j, j) * s[j] * s[j];
    for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > 0)) throw NumericalError("Gram matrix is not positive definite");
    L(j, j) = sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      Real v = G(i, j) * s[i] * s[j];
      for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
  }
  // Y = L^{-1} (D K D), then C = L^{-1} Y^T.
  SquareMatrix<Real> Y(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      Real v = K(i, col) * s[i] * s[col];
      for (int k = 0; k < i; ++k) v -= L(i, k) * Y(k, col);
      Y(i, col) = v / L(i, i);
    }
  }
  SquareMatrix<Real> C(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      Real v = Y(col, i);
      for (int k = 0; k < i; ++k) v -= L(i, k) * C(k, col);
      C(i, col) = v / L(i, i);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) C(i, j) = (C(i, j) + C(j, i)) / 2;

  SymmetricEigen<Real> eig = symmetric_eigen(C, eps);
  // c = D^{-1/2} L^{-T} y.
  for (int col = 0; col < n; ++col) {
    for (int i = n - 1; i >= 0; --i) {
      Real v = eig.vectors(i, col);
      for (int k = i + 1; k < n; ++k) v -= L(k, i) * eig.vectors(k, col);
      eig.vectors(i, col) = v / L(i, i);
    }
    for (int i = 0; i < n; ++i) eig.vectors(i, col) *= s[i];
  }
  return eig;
}

}  // namespace stclt::detail
