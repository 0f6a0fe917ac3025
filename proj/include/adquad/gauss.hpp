#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adquad {

inline constexpr int kMaxGaussPoints = 64;
inline constexpr int kMaxDim = 8;

/// One-dimensional Gauss-Legendre rule on [-1, 1].
/// Nodes are strictly increasing and symmetric about 0; weights are
/// positive, symmetric, and sum to 2.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t count() const { return nodes.size(); }
};

/// Quadrature rule in `dim` dimensions. Points are stored flat,
/// point i occupying [i*dim, (i+1)*dim).
struct RuleND {
  int dim = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t count() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(dim);
    return {points.data() + i * d, d};
  }
};

namespace detail {

/// Legendre P_m(x) and P_m'(x) by three-term recurrence.
inline std::pair<double, double> legendre_pd(int m, double x) {
  double prev = 1.0;
  double curr = x;
  for (int k = 2; k <= m; ++k) {
    const double next = ((2.0 * k - 1.0) * x * curr - (k - 1.0) * prev) / k;
    prev = curr;
    curr = next;
  }
  const double deriv = (x * x == 1.0)
                           ? 0.5 * m * (m + 1.0) * (x > 0 ? 1.0 : ((m % 2) ? 1.0 : -1.0))
                           : static_cast<double>(m) * (x * curr - prev) / (x * x - 1.0);
  return {curr, deriv};
}

}  // namespace detail

/// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials of
/// degree 2m-1. Nodes are found by Newton iteration on P_m with Chebyshev
/// initial guesses, converged to |step| <= 1e-15, then mirrored so the
/// symmetry node[i] == -node[m-1-i] holds bit-exactly.
inline Rule1D gauss_legendre_1d(int m) {
  if (m < 1 || m > kMaxGaussPoints) {
    throw std::invalid_argument("gauss_legendre_1d: point count must be in [1, " +
                                std::to_string(kMaxGaussPoints) + "], got " +
                                std::to_string(m));
  }
  Rule1D rule;
  rule.nodes.assign(static_cast<std::size_t>(m), 0.0);
  rule.weights.assign(static_cast<std::size_t>(m), 0.0);

  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }

  for (int i = 0; i < m / 2; ++i) {
    // Chebyshev-based initial guess for the i-th negative root of P_m.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double deriv = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_pd(m, x);
      const double step = p / dp;
      x -= step;
      deriv = dp;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("gauss_legendre_1d: Newton iteration failed for m=" +
                               std::to_string(m));
    }
    // One clean derivative evaluation at the converged node.
    deriv = detail::legendre_pd(m, x).second;
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  if (m % 2 == 1) {
    const double dp = detail::legendre_pd(m, 0.0).second;
    rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
    rule.weights[static_cast<std::size_t>(m / 2)] = 2.0 / (dp * dp);
  }
  return rule;
}

/// Tensor-product rule with m points per direction on the reference cell
/// [0,1]^dim. Point ordering is lexicographic with the first coordinate
/// varying fastest: point t has node index (t / m^j) % m in direction j.
/// Weights sum to 1.
inline RuleND reference_rule(int m, int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("reference_rule: dim must be in [1, " +
                                std::to_string(kMaxDim) + "], got " +
                                std::to_string(dim));
  }
  const Rule1D base = gauss_legendre_1d(m);

  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) {
    if (total > (std::size_t{1} << 27) / static_cast<std::size_t>(m)) {
      throw std::invalid_argument("reference_rule: m^dim exceeds the supported size");
    }
    total *= static_cast<std::size_t>(m);
  }

  // 1-D rule mapped from [-1,1] to [0,1].
  std::vector<double> x01(base.nodes.size()), w01(base.weights.size());
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    x01[i] = (1.0 + base.nodes[i]) / 2.0;
    w01[i] = base.weights[i] / 2.0;
  }

  RuleND rule;
  rule.dim = dim;
  rule.points.resize(total * static_cast<std::size_t>(dim));
  rule.weights.resize(total);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rest = t;
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      const std::size_t idx = rest % static_cast<std::size_t>(m);
      rest /= static_cast<std::size_t>(m);
      rule.points[t * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] = x01[idx];
      w *= w01[idx];
    }
    rule.weights[t] = w;
  }
  return rule;
}

}  // namespace adquad
