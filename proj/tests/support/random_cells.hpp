#pragma once

// Deterministic random generators for property tests. All suites seed their
// own std::mt19937 so runs are reproducible.

#include <cmath>
#include <random>
#include <vector>

#include "adquad/cell.hpp"

namespace adquad::testing {

inline Parallelepiped random_cell(std::mt19937& rng, int dim, bool axis_aligned) {
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> edge(-1.5, 1.5);
  const auto d = static_cast<std::size_t>(dim);
  for (;;) {
    Parallelepiped cell;
    cell.dim = dim;
    cell.base.resize(d);
    for (auto& b : cell.base) b = coord(rng);
    cell.edges.assign(d * d, 0.0);
    if (axis_aligned) {
      for (std::size_t j = 0; j < d; ++j) {
        double e = edge(rng);
        if (std::abs(e) < 0.2) e = e < 0 ? -0.2 : 0.2;
        cell.edges[j * d + j] = e;
      }
    } else {
      for (auto& e : cell.edges) e = edge(rng);
    }
    const double det = std::abs(detail::determinant(cell.edges, dim));
    if (det > 0.1 * detail::edge_norm_product(cell)) return cell;
  }
}

inline std::vector<double> random_point_in_cell(std::mt19937& rng, const Parallelepiped& cell) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = static_cast<std::size_t>(cell.dim);
  std::vector<double> p(cell.base);
  for (std::size_t j = 0; j < d; ++j) {
    const double t = unit(rng);
    for (std::size_t c = 0; c < d; ++c) p[c] += t * cell.edges[j * d + c];
  }
  return p;
}

}  // namespace adquad::testing
