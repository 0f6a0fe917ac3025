#include "adquad/gauss.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace adquad {
namespace {

// closed form of int_{-1}^{1} x^k dx
double monomial_integral_sym(int k) { return k % 2 == 0 ? 2.0 / (k + 1) : 0.0; }

TEST(GaussLegendre1D, OnePointIsMidpointRule) {
  const Rule1D rule = gauss_legendre_1d(1);
  ASSERT_EQ(rule.count(), 1u);
  EXPECT_EQ(rule.nodes[0], 0.0);
  EXPECT_EQ(rule.weights[0], 2.0);
}

TEST(GaussLegendre1D, TwoPointValues) {
  const Rule1D rule = gauss_legendre_1d(2);
  ASSERT_EQ(rule.count(), 2u);
  const double node = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(rule.nodes[0], -node, 1e-15);
  EXPECT_NEAR(rule.nodes[1], node, 1e-15);
  EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(rule.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre1D, SymmetryPositivityAndWeightSum) {
  for (int m = 1; m <= kMaxGaussPoints; ++m) {
    const Rule1D rule = gauss_legendre_1d(m);
    ASSERT_EQ(rule.count(), static_cast<std::size_t>(m));
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      EXPECT_GT(rule.weights[static_cast<std::size_t>(i)], 0.0);
      sum += rule.weights[static_cast<std::size_t>(i)];
      if (i > 0) EXPECT_LT(rule.nodes[static_cast<std::size_t>(i - 1)], rule.nodes[static_cast<std::size_t>(i)]);
      EXPECT_GT(rule.nodes[static_cast<std::size_t>(i)], -1.0);
      EXPECT_LT(rule.nodes[static_cast<std::size_t>(i)], 1.0);
      // mirrored bit-exactly
      EXPECT_EQ(rule.nodes[static_cast<std::size_t>(i)],
                -rule.nodes[static_cast<std::size_t>(m - 1 - i)]);
      EXPECT_EQ(rule.weights[static_cast<std::size_t>(i)],
                rule.weights[static_cast<std::size_t>(m - 1 - i)]);
    }
    EXPECT_NEAR(sum, 2.0, 1e-14);
  }
}

TEST(GaussLegendre1D, MonomialExactnessUpToDegree2mMinus1) {
  for (int m = 1; m <= 16; ++m) {
    const Rule1D rule = gauss_legendre_1d(m);
    for (int k = 0; k <= 2 * m - 1; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.count(); ++i) {
        acc += rule.weights[i] * std::pow(rule.nodes[i], k);
      }
      const double exact = monomial_integral_sym(k);
      if (k % 2 == 0) {
        EXPECT_NEAR(acc, exact, 1e-12 * exact) << "m=" << m << " k=" << k;
      } else {
        EXPECT_NEAR(acc, 0.0, 1e-12 * monomial_integral_sym(k - 1)) << "m=" << m << " k=" << k;
      }
    }
  }
}

TEST(GaussLegendre1D, FivePointAgainstOddEvenOracle) {
  // the m=5 values are pinned by exactness for k = 0..9
  const Rule1D rule = gauss_legendre_1d(5);
  for (int k = 0; k <= 9; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.count(); ++i) {
      acc += rule.weights[i] * std::pow(rule.nodes[i], k);
    }
    EXPECT_NEAR(acc, monomial_integral_sym(k), 1e-13);
  }
  EXPECT_EQ(rule.nodes[2], 0.0);
}

TEST(GaussLegendre1D, RejectsOutOfRangeCounts) {
  EXPECT_THROW(gauss_legendre_1d(0), std::invalid_argument);
  EXPECT_THROW(gauss_legendre_1d(-3), std::invalid_argument);
  EXPECT_THROW(gauss_legendre_1d(kMaxGaussPoints + 1), std::invalid_argument);
}

TEST(ReferenceRule, OnePointOneDim) {
  const RuleND rule = reference_rule(1, 1);
  ASSERT_EQ(rule.count(), 1u);
  EXPECT_EQ(rule.points[0], 0.5);
  EXPECT_EQ(rule.weights[0], 1.0);
}

TEST(ReferenceRule, TwoPointTwoDimLayout) {
  const RuleND rule = reference_rule(2, 2);
  ASSERT_EQ(rule.count(), 4u);
  const double a = (1.0 - 1.0 / std::sqrt(3.0)) / 2.0;
  const double b = (1.0 + 1.0 / std::sqrt(3.0)) / 2.0;
  // first coordinate varies fastest
  const double expected[4][2] = {{a, a}, {b, a}, {a, b}, {b, b}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(rule.points[2 * i], expected[i][0], 1e-15);
    EXPECT_NEAR(rule.points[2 * i + 1], expected[i][1], 1e-15);
    EXPECT_NEAR(rule.weights[i], 0.25, 1e-15);
  }
}

TEST(ReferenceRule, TensorOrderingFirstCoordinateFastest) {
  const int m = 3, dim = 3;
  const RuleND rule = reference_rule(m, dim);
  const Rule1D base = gauss_legendre_1d(m);
  ASSERT_EQ(rule.count(), 27u);
  for (std::size_t t = 0; t < rule.count(); ++t) {
    std::size_t rest = t;
    for (int j = 0; j < dim; ++j) {
      const std::size_t idx = rest % static_cast<std::size_t>(m);
      rest /= static_cast<std::size_t>(m);
      const double want = (1.0 + base.nodes[idx]) / 2.0;
      EXPECT_EQ(rule.points[t * 3 + static_cast<std::size_t>(j)], want);
    }
  }
}

TEST(ReferenceRule, CountWeightSumAndOpenCube) {
  const RuleND rule = reference_rule(5, 3);
  ASSERT_EQ(rule.count(), 125u);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.count(); ++i) {
    sum += rule.weights[i];
    EXPECT_GT(rule.weights[i], 0.0);
  }
  EXPECT_NEAR(sum, 1.0, 1e-13);
  for (double c : rule.points) {
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 1.0);
  }
}

TEST(ReferenceRule, RejectsBadDimension) {
  EXPECT_THROW(reference_rule(5, 0), std::invalid_argument);
  EXPECT_THROW(reference_rule(5, kMaxDim + 1), std::invalid_argument);
}

double nd_monomial_sum(const RuleND& rule, const std::vector<int>& k) {
  double acc = 0.0;
  const auto d = static_cast<std::size_t>(rule.dim);
  for (std::size_t i = 0; i < rule.count(); ++i) {
    double v = rule.weights[i];
    for (std::size_t c = 0; c < d; ++c) {
      v *= std::pow(rule.points[i * d + c], k[c]);
    }
    acc += v;
  }
  return acc;
}

double nd_monomial_exact01(const std::vector<int>& k) {
  double v = 1.0;
  for (int e : k) v /= e + 1.0;
  return v;
}

TEST(ReferenceRule, MonomialExactnessExhaustiveSmall) {
  for (int m = 1; m <= 4; ++m) {
    for (int dim = 1; dim <= 3; ++dim) {
      const RuleND rule = reference_rule(m, dim);
      std::vector<int> k(static_cast<std::size_t>(dim), 0);
      for (;;) {
        const double exact = nd_monomial_exact01(k);
        EXPECT_NEAR(nd_monomial_sum(rule, k), exact, 1e-12 * exact)
            << "m=" << m << " dim=" << dim;
        int j = 0;
        while (j < dim && ++k[static_cast<std::size_t>(j)] > 2 * m - 1) {
          k[static_cast<std::size_t>(j)] = 0;
          ++j;
        }
        if (j == dim) break;
      }
    }
  }
}

TEST(ReferenceRule, MonomialExactnessSampledLarge) {
  std::mt19937 rng(20240811);
  for (int m : {5, 8, 11, 16}) {
    for (int dim = 1; dim <= 4; ++dim) {
      const RuleND rule = reference_rule(m, dim);
      std::uniform_int_distribution<int> deg(0, 2 * m - 1);
      for (int trial = 0; trial < 40; ++trial) {
        std::vector<int> k(static_cast<std::size_t>(dim));
        for (auto& e : k) e = deg(rng);
        const double exact = nd_monomial_exact01(k);
        EXPECT_NEAR(nd_monomial_sum(rule, k), exact, 1e-12 * exact)
            << "m=" << m << " dim=" << dim;
      }
    }
  }
}

}  // namespace
}  // namespace adquad
