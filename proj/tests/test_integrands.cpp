#include "adquad/integrands.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "adquad/cell.hpp"
#include "adquad/gauss.hpp"
#include "support/reference_values.hpp"

namespace adquad {
namespace {

TEST(GaussianBump, PeaksAtCenter) {
  const auto f1 = gaussian_bump(10.0, 100.0, {0.0, 0.0, 0.0});
  const std::array<double, 3> origin{0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(f1(origin), 10.0);

  const auto f2 = gaussian_bump(100.0, 200.0, {0.81, 0.62, 0.73});
  const std::array<double, 3> center{0.81, 0.62, 0.73};
  EXPECT_DOUBLE_EQ(f2(center), 100.0);
}

TEST(GaussianBump, ClosedFormOverUnitCubeMatchesErfProduct) {
  const auto f1 = gaussian_bump(10.0, 100.0, {0.0, 0.0, 0.0});
  const auto value = f1.analytic_integral(unit_cube(3));
  ASSERT_TRUE(value.has_value());
  const double per_axis = std::sqrt(std::numbers::pi) / 20.0 * std::erf(10.0);
  EXPECT_NEAR(*value, 10.0 * per_axis * per_axis * per_axis, 1e-16);
  // no closed form on sheared cells
  const Parallelepiped shear = make_cell({0.0, 0.0, 0.0},
                                         {1, 0, 0, 1, 1, 0, 0, 0, 1});
  EXPECT_FALSE(f1.analytic_integral(shear).has_value());
}

TEST(GaussianBump, RejectsBadAlpha) {
  EXPECT_THROW(gaussian_bump(1.0, 0.0, {0.0}), std::invalid_argument);
  EXPECT_THROW(gaussian_bump(1.0, -5.0, {0.0}), std::invalid_argument);
}

TEST(Integrand, BatchSplittingIsConsistent) {
  const auto f = gaussian_bump(3.0, 7.0, {0.2, -0.4});
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<double> pts(2 * 64);
  for (auto& p : pts) p = coord(rng);
  std::vector<double> whole(64);
  f.evaluate(pts, whole);
  std::vector<double> first(40), rest(24);
  f.evaluate({pts.data(), 80}, first);
  f.evaluate({pts.data() + 80, 48}, rest);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(whole[i], first[i]);
  for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(whole[40 + i], rest[i]);
}

TEST(LinearCusp, ValueAndClosedForms) {
  const auto f = linear_cusp(2);
  const std::array<double, 2> origin{0.0, 0.0};
  EXPECT_DOUBLE_EQ(f(origin), 1.0);

  EXPECT_DOUBLE_EQ(*linear_cusp(1).analytic_integral(symmetric_cube(1)), 1.0);
  const auto square = linear_cusp(2).analytic_integral(symmetric_cube(2));
  ASSERT_TRUE(square.has_value());
  EXPECT_NEAR(*square, 0.93921713414314918, 1e-15);
  // matches the independent radial-reduction value
  EXPECT_NEAR(*square, testing::linear_cusp_sym_cube(2), 1e-14);
  EXPECT_FALSE(linear_cusp(3).analytic_integral(symmetric_cube(3)).has_value());
  EXPECT_FALSE(linear_cusp(2).analytic_integral(unit_cube(2)).has_value());
}

TEST(ExpCusp, ValueAndIntervalClosedForm) {
  const auto f = exp_cusp(20.0, 1);
  const std::array<double, 1> origin{0.0};
  EXPECT_DOUBLE_EQ(f(origin), 1.0);

  const auto sym = f.analytic_integral(symmetric_cube(1));
  ASSERT_TRUE(sym.has_value());
  EXPECT_NEAR(*sym, (1.0 - std::exp(-20.0)) / 10.0, 1e-17);

  // one-sided and shifted intervals
  const auto right = f.analytic_integral(make_cell({0.5}, {1.5}));
  ASSERT_TRUE(right.has_value());
  EXPECT_NEAR(*right, (std::exp(-10.0) - std::exp(-40.0)) / 20.0, 1e-19);
  const auto left = f.analytic_integral(make_cell({-2.0}, {1.5}));
  ASSERT_TRUE(left.has_value());
  EXPECT_NEAR(*left, (std::exp(-10.0) - std::exp(-40.0)) / 20.0, 1e-19);

  EXPECT_THROW(exp_cusp(0.0, 1), std::invalid_argument);
}

TEST(CuspIntegrands, RadiallySymmetricUnderRotation) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);

  auto rotate2 = [](std::array<double, 2> p, double a) {
    return std::array<double, 2>{std::cos(a) * p[0] - std::sin(a) * p[1],
                                 std::sin(a) * p[0] + std::cos(a) * p[1]};
  };
  for (const auto& f : {linear_cusp(2), exp_cusp(20.0, 2)}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::array<double, 2> p{coord(rng), coord(rng)};
      const auto q = rotate2(p, angle(rng));
      EXPECT_NEAR(f(p), f(q), 1e-13);
    }
  }

  // 3-D: compose rotations in the xy, yz, xz planes
  for (const auto& f : {linear_cusp(3), exp_cusp(20.0, 3)}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::array<double, 3> p{coord(rng), coord(rng), coord(rng)};
      std::array<double, 3> q = p;
      for (int axis = 0; axis < 3; ++axis) {
        const double a = angle(rng);
        const int i = axis, j = (axis + 1) % 3;
        const double qi = std::cos(a) * q[static_cast<std::size_t>(i)] - std::sin(a) * q[static_cast<std::size_t>(j)];
        const double qj = std::sin(a) * q[static_cast<std::size_t>(i)] + std::cos(a) * q[static_cast<std::size_t>(j)];
        q[static_cast<std::size_t>(i)] = qi;
        q[static_cast<std::size_t>(j)] = qj;
      }
      EXPECT_NEAR(f(p), f(q), 1e-13);
    }
  }
}

TEST(RegularizedHeaviside, BranchValues) {
  for (double eps : {1.0, 0.085, 1e-8, 1e3}) {
    EXPECT_EQ(regularized_heaviside(0.0, eps), 0.5);
    EXPECT_EQ(regularized_heaviside(-2.0 * eps, eps), 0.0);
    EXPECT_EQ(regularized_heaviside(2.0 * eps, eps), 1.0);
    EXPECT_EQ(regularized_heaviside(-eps, eps), 0.0);
    EXPECT_EQ(regularized_heaviside(eps, eps), 1.0);
  }
  EXPECT_THROW(regularized_heaviside(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(regularized_heaviside(0.0, -1.0), std::invalid_argument);
}

TEST(RegularizedHeaviside, HalfEpsIsExactDyadicRational) {
  // Horner evaluation at u = 1/2 is exact dyadic arithmetic.
  for (double eps : {1.0, 0.25, 0.0225}) {
    EXPECT_EQ(regularized_heaviside(eps / 2.0, eps), 124659.0 / 131072.0);
  }
  EXPECT_NEAR(regularized_heaviside(0.5, 1.0), 0.951072692871, 1e-12);
}

TEST(RegularizedHeaviside, SymmetryAndMonotonicity) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  std::uniform_real_distribution<double> log_eps(-6.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = std::pow(10.0, log_eps(rng));
    const double phi = unit(rng) * eps;
    EXPECT_NEAR(regularized_heaviside(phi, eps) + regularized_heaviside(-phi, eps), 1.0, 1e-13);
    const double phi2 = unit(rng) * eps;
    const double lo = std::min(phi, phi2), hi = std::max(phi, phi2);
    EXPECT_LE(regularized_heaviside(lo, eps), regularized_heaviside(hi, eps));
  }
  // output stays in [0, 1] for values in and out of the band
  for (int trial = 0; trial < 200; ++trial) {
    const double v = regularized_heaviside(unit(rng) * 3.0, 0.7);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(RegularizedHeaviside, DerivativesVanishAtSeams) {
  for (double eps : {1.0, 0.085, 0.0225}) {
    for (int k = 1; k <= 4; ++k) {
      const double scale = 1.0 / std::pow(eps, k);
      EXPECT_NEAR(regularized_heaviside_derivative(eps, eps, k), 0.0, 1e-10 * scale);
      EXPECT_NEAR(regularized_heaviside_derivative(-eps, eps, k), 0.0, 1e-10 * scale);
      EXPECT_EQ(regularized_heaviside_derivative(2.0 * eps, eps, k), 0.0);
    }
    // first derivative at the midpoint is the normalized bump itself
    EXPECT_NEAR(regularized_heaviside_derivative(0.0, eps, 1), 315.0 / (256.0 * eps),
                1e-12 / eps);
  }
}

TEST(RegularizedHeaviside, IntegralFormMatchesClosedForm) {
  // integrating the C^4 bump (1 - xi^2/eps^2)^4 / V_eps from -eps to phi
  // must reproduce the closed-form ramp; Gauss with 8 points is exact for
  // the degree-8 integrand.
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> log_eps(-6.0, 1.0);
  const Rule1D gauss = gauss_legendre_1d(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double eps = std::pow(10.0, log_eps(rng));
    const double phi = unit(rng) * eps;
    const double v_eps = 256.0 * eps / 315.0;
    const double mid = 0.5 * (phi + (-eps)), half = 0.5 * (phi + eps);
    double acc = 0.0;
    for (std::size_t i = 0; i < gauss.count(); ++i) {
      const double xi = mid + half * gauss.nodes[i];
      const double t = 1.0 - xi * xi / (eps * eps);
      acc += half * gauss.weights[i] * t * t * t * t / v_eps;
    }
    EXPECT_NEAR(acc, regularized_heaviside(phi, eps), 1e-10);
  }
}

TEST(SignedDistance, StraightLineAxisAligned) {
  // vertical line through (0.5, 0) with unit normal (1, 0)
  const auto iface = Interface2D::straight({0.5, 0.0}, {0.5, 1.0});
  for (double y : {-0.3, 0.0, 0.4, 1.2}) {
    EXPECT_NEAR(signed_distance(iface, {0.75, y}), 0.25, 1e-15);
    EXPECT_NEAR(signed_distance(iface, {0.25, y}), -0.25, 1e-15);
  }
}

TEST(SignedDistance, ZeroOnEveryInterface) {
  const auto straight = Interface2D::straight();
  for (double t : {0.0, 0.3, 0.77, 1.0}) {
    const std::array<double, 2> p{0.55 + t * (0.35 - 0.55), t};
    EXPECT_NEAR(signed_distance(straight, p), 0.0, 1e-12);
  }
  const auto kinked = Interface2D::kinked();
  for (const auto& v : kinked.vertices) {
    EXPECT_NEAR(signed_distance(kinked, v), 0.0, 1e-12);
  }
  const auto quad = Interface2D::quadratic();
  for (double x : {0.0, 0.31, 0.5, 0.9}) {
    const double y = quad.coeffs[0] + x * (quad.coeffs[1] + x * quad.coeffs[2]);
    EXPECT_NEAR(signed_distance(quad, {x, y}), 0.0, 1e-10);
  }
}

TEST(SignedDistance, SignFlipsAcrossInterfaces) {
  // straight and kinked interfaces run top to bottom, the quadratic one left
  // to right
  for (const auto& iface : {Interface2D::straight(), Interface2D::kinked()}) {
    const double lo = signed_distance(iface, {0.05, 0.25});
    const double hi = signed_distance(iface, {0.95, 0.25});
    EXPECT_LT(lo * hi, 0.0);
  }
  const auto quad = Interface2D::quadratic();
  EXPECT_LT(signed_distance(quad, {0.5, 0.1}) * signed_distance(quad, {0.5, 0.9}), 0.0);
}

double dense_polyline_distance(const std::vector<std::array<double, 2>>& v,
                               std::array<double, 2> p, int samples_per_segment) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    for (int i = 0; i <= samples_per_segment; ++i) {
      const double t = static_cast<double>(i) / samples_per_segment;
      const double x = v[s][0] + t * (v[s + 1][0] - v[s][0]);
      const double y = v[s][1] + t * (v[s + 1][1] - v[s][1]);
      best = std::min(best, std::hypot(p[0] - x, p[1] - y));
    }
  }
  return best;
}

TEST(SignedDistance, KinkedMatchesDenseSamplingOracle) {
  const auto iface = Interface2D::kinked();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::array<double, 2> p{unit(rng), unit(rng)};
    const double oracle = dense_polyline_distance(iface.vertices, p, 1 << 20);
    EXPECT_NEAR(std::abs(signed_distance(iface, p)), oracle, 1e-8);
  }
  // a point equidistant from both segments, neary the kink vertex
  const std::array<double, 2> near_kink{0.45 + 0.2, 0.5};
  const double oracle = dense_polyline_distance(iface.vertices, near_kink, 1 << 21);
  EXPECT_NEAR(std::abs(signed_distance(iface, near_kink)), oracle, 1e-8);
}

TEST(SignedDistance, LipschitzForStraightAndKinked) {
  std::mt19937 rng(19);
  // the straight-line distance is globally Lipschitz-1; the kinked one is
  // Lipschitz-1 on the strip its polyline spans, which covers the unit square
  std::uniform_real_distribution<double> wide(-1.0, 2.0);
  const auto straight = Interface2D::straight();
  for (int trial = 0; trial < 300; ++trial) {
    const std::array<double, 2> p{wide(rng), wide(rng)};
    const std::array<double, 2> q{wide(rng), wide(rng)};
    const double lhs = std::abs(signed_distance(straight, p) - signed_distance(straight, q));
    EXPECT_LE(lhs, std::hypot(p[0] - q[0], p[1] - q[1]) + 1e-12);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto kinked = Interface2D::kinked();
  for (int trial = 0; trial < 300; ++trial) {
    const std::array<double, 2> p{unit(rng), unit(rng)};
    const std::array<double, 2> q{unit(rng), unit(rng)};
    const double lhs = std::abs(signed_distance(kinked, p) - signed_distance(kinked, q));
    EXPECT_LE(lhs, std::hypot(p[0] - q[0], p[1] - q[1]) + 1e-12);
  }
}

double dense_quadratic_distance(const std::array<double, 3>& c, std::array<double, 2> p) {
  double best = std::numeric_limits<double>::infinity();
  const int n = 4'000'000;
  for (int i = 0; i <= n; ++i) {
    const double t = -4.0 + 9.0 * static_cast<double>(i) / n;
    const double y = c[0] + t * (c[1] + t * c[2]);
    best = std::min(best, std::hypot(p[0] - t, p[1] - y));
  }
  return best;
}

TEST(SignedDistance, QuadraticMatchesDenseSamplingOracle) {
  const auto iface = Interface2D::quadratic();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::array<double, 2> p{unit(rng), unit(rng)};
    const double oracle = dense_quadratic_distance(iface.coeffs, p);
    EXPECT_NEAR(std::abs(signed_distance(iface, p)), oracle, 1e-8);
  }
}

TEST(Interface2D, ConstructorValidation) {
  EXPECT_THROW(Interface2D::straight({0.5, 0.5}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(Interface2D::kinked({0.0, 0.5}, {0.1, 0.2}, {0.2, 1.0}), std::invalid_argument);
}

TEST(HeavisideFamily, FiveMembersSharpestLast) {
  const auto family = heaviside_family(Interface2D::straight(), 1.0);
  ASSERT_EQ(family.size(), 5u);
  EXPECT_EQ(family.back().label(), "heaviside(straight,0.0225)");
  EXPECT_EQ(family.front().label(), "heaviside(straight,2.5)");

  // composition agrees with psi(phi(x), eps) pointwise and maps into [0,1]
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto iface = Interface2D::straight();
  for (int trial = 0; trial < 50; ++trial) {
    const std::array<double, 2> p{unit(rng), unit(rng)};
    for (std::size_t k = 0; k < family.size(); ++k) {
      const double v = family[k](p);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_EQ(v, regularized_heaviside(signed_distance(iface, p), kHeavisideEpsOverH[k]));
    }
  }
  EXPECT_THROW(heaviside_family(Interface2D::straight(), 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace adquad
