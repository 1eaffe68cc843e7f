#include <gtest/gtest.h>

#include <random>

#include "stclt/error.hpp"
#include "stclt/qexp.hpp"

using namespace stclt;

namespace {

// q * prod_{n>=1} (1 - q^n)^24, truncated to prec coefficients.
std::vector<BigInt> delta_product(long prec) {
  std::vector<BigInt> c(prec);
  if (prec > 1) c[1] = 1;
  for (long n = 1; n < prec; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      for (long i = prec - 1; i >= n; --i) c[i] -= c[i - n];
    }
  }
  return c;
}

QExpansion random_series(std::mt19937_64& rng, long prec) {
  std::uniform_int_distribution<long> dist(-1000, 1000);
  std::vector<BigInt> c(prec);
  for (auto& x : c) x = dist(rng);
  return QExpansion(0, c);
}

}  // namespace

TEST(QExpansion, EisensteinSmallCases) {
  auto e4 = eisenstein_series(4, 3);
  ASSERT_EQ(e4.prec(), 3);
  EXPECT_EQ(e4[0], 1);
  EXPECT_EQ(e4[1], 240);
  EXPECT_EQ(e4[2], 2160);
  EXPECT_EQ(eisenstein_series(4, 1).prec(), 1);
  auto e6 = eisenstein_series(6, 2);
  EXPECT_EQ(e6[0], 1);
  EXPECT_EQ(e6[1], -504);
  EXPECT_THROW(eisenstein_series(8, 3), InvalidArgument);
}

TEST(QExpansion, DeltaMatchesProductExpansion) {
  auto d2 = delta(2);
  EXPECT_EQ(d2[0], 0);
  EXPECT_EQ(d2[1], 1);
  EXPECT_EQ(delta(3)[2], -24);
  EXPECT_EQ(delta(4)[3], 252);
  const long prec = 120;
  auto oracle = delta_product(prec);
  auto d = delta(prec);
  for (long n = 0; n < prec; ++n) EXPECT_EQ(d[n], oracle[n]) << "n=" << n;
}

TEST(QExpansion, Delta1728Divisibility) {
  const long prec = 200;
  auto e4 = eisenstein_series(4, prec);
  auto e6 = eisenstein_series(6, prec);
  auto diff = e4 * e4 * e4 - e6 * e6;
  for (long n = 0; n < prec; ++n) EXPECT_EQ(diff[n] % 1728, 0);
}

TEST(QExpansion, MultiplicationCommutesAndAssociates) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, 5 + trial);
    auto b = random_series(rng, 9 + trial % 4);
    auto c = random_series(rng, 7 + trial % 5);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ((a * b).prec(), std::min(a.prec(), b.prec()));
  }
}

TEST(QExpansion, PrecisionNeverExtends) {
  auto a = eisenstein_series(4, 10);
  auto b = eisenstein_series(6, 4);
  EXPECT_EQ((a + b).prec(), 4);
  EXPECT_EQ((a * b).prec(), 4);
  EXPECT_EQ(a.pow(3).prec(), 10);
  EXPECT_THROW(b.truncated(5), PrecisionError);
  EXPECT_THROW(b[4], InvalidArgument);
}

TEST(DimCuspForms, ClassicalValues) {
  EXPECT_EQ(dim_cusp_forms(12), 1);
  EXPECT_EQ(dim_cusp_forms(24), 2);
  EXPECT_EQ(dim_cusp_forms(2), 0);
  EXPECT_EQ(dim_cusp_forms(0), 0);
  EXPECT_EQ(dim_cusp_forms(14), 0);
  EXPECT_EQ(dim_cusp_forms(26), 1);
  EXPECT_THROW(dim_cusp_forms(13), InvalidArgument);
}

TEST(DimCuspForms, MonomialCountOracle) {
  // Count (j, a, b) with j >= 1 and 12j + 4a + 6b = k.
  for (int k = 0; k <= 400; k += 2) {
    int count = 0;
    for (int j = 1; 12 * j <= k; ++j) {
      const int r = k - 12 * j;
      for (int b = 0; 6 * b <= r; ++b)
        if ((r - 6 * b) % 4 == 0) {
          ++count;
          break;
        }
    }
    EXPECT_EQ(dim_cusp_forms(k), count) << "k=" << k;
    if (k >= 4) EXPECT_LE(std::abs(dim_cusp_forms(k) - (k - 1) / 12.0), 2.0);
  }
}

TEST(MillerBasis, SmallWeights) {
  auto b12 = miller_basis(12, 5);
  ASSERT_EQ(b12.dim(), 1);
  EXPECT_EQ(b12.forms[0].coeffs().size(), 5u);
  for (long n = 0; n < 5; ++n) EXPECT_EQ(b12.forms[0][n], delta(5)[n]);
  EXPECT_EQ(miller_basis(10, 5).dim(), 0);
  auto b24 = miller_basis(24, 5);
  ASSERT_EQ(b24.dim(), 2);
  EXPECT_EQ(b24.forms[0][1], 1);
  EXPECT_EQ(b24.forms[0][2], 0);
  EXPECT_EQ(b24.forms[1][1], 0);
  EXPECT_EQ(b24.forms[1][2], 1);
  EXPECT_THROW(miller_basis(24, 2), PrecisionError);
}

TEST(MillerBasis, EchelonAndDimensionSweep) {
  for (int k = 12; k <= 120; k += 2) {
    const int d = dim_cusp_forms(k);
    auto basis = miller_basis(k, d + 3);
    ASSERT_EQ(basis.dim(), d) << "k=" << k;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= d; ++j) {
        const BigInt expected = (j == i + 1) ? 1 : 0;
        EXPECT_EQ(basis.forms[i][j], expected) << "k=" << k << " i=" << i << " j=" << j;
      }
    }
  }
}

TEST(MillerBasis, Weight24SpanContainsDeltaE4Cubed) {
  // Delta * E4^3 is a cusp form of weight 24 so it is an integer combination
  // of the basis determined by its first two coefficients.
  const long prec = 30;
  auto basis = miller_basis(24, prec);
  auto f = delta(prec) * eisenstein_series(4, prec).pow(3);
  auto g = f[1] * basis.forms[0] + f[2] * basis.forms[1];
  for (long n = 0; n < prec; ++n) EXPECT_EQ(f[n], g[n]);
}
