#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adquad/errors.hpp"
#include "adquad/gauss.hpp"

namespace adquad {

/// n-dimensional parallelepiped given by a base point and n edge vectors.
/// `edges` is row-major dim x dim; row j is the j-th lattice vector, so the
/// cell is { base + sum_j t_j * edge_j : t in [0,1]^dim }.
struct Parallelepiped {
  int dim = 0;
  std::vector<double> base;
  std::vector<double> edges;

  std::span<const double> edge(int j) const {
    const auto d = static_cast<std::size_t>(dim);
    return {edges.data() + static_cast<std::size_t>(j) * d, d};
  }
};

inline Parallelepiped make_cell(std::vector<double> base, std::vector<double> edges) {
  const auto dim = base.size();
  if (dim == 0 || edges.size() != dim * dim) {
    throw std::invalid_argument("make_cell: edges must be dim x dim with dim >= 1");
  }
  Parallelepiped cell;
  cell.dim = static_cast<int>(dim);
  cell.base = std::move(base);
  cell.edges = std::move(edges);
  return cell;
}

/// [0,1]^dim
inline Parallelepiped unit_cube(int dim) {
  Parallelepiped cell;
  cell.dim = dim;
  cell.base.assign(static_cast<std::size_t>(dim), 0.0);
  cell.edges.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
  for (int j = 0; j < dim; ++j) {
    cell.edges[static_cast<std::size_t>(j) * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(j)] = 1.0;
  }
  return cell;
}

/// [-1,1]^dim
inline Parallelepiped symmetric_cube(int dim) {
  Parallelepiped cell = unit_cube(dim);
  for (auto& b : cell.base) b = -1.0;
  for (auto& e : cell.edges) e *= 2.0;
  return cell;
}

namespace detail {

/// Determinant of the row-major dim x dim matrix by Gaussian elimination
/// with partial pivoting.
inline double determinant(std::span<const double> m, int dim) {
  const auto n = static_cast<std::size_t>(dim);
  std::vector<double> a(m.begin(), m.end());
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      det = -det;
    }
    det *= a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

inline double edge_norm_product(const Parallelepiped& cell) {
  double prod = 1.0;
  for (int j = 0; j < cell.dim; ++j) {
    double s = 0.0;
    for (double e : cell.edge(j)) s += e * e;
    prod *= std::sqrt(s);
  }
  return prod;
}

}  // namespace detail

inline void validate_cell(const Parallelepiped& cell) {
  if (cell.dim < 1 ||
      cell.base.size() != static_cast<std::size_t>(cell.dim) ||
      cell.edges.size() != static_cast<std::size_t>(cell.dim) * static_cast<std::size_t>(cell.dim)) {
    throw std::invalid_argument("cell: inconsistent dimensions");
  }
  const double det = detail::determinant(cell.edges, cell.dim);
  if (std::abs(det) <= 1e-14 * detail::edge_norm_product(cell)) {
    throw degenerate_cell_error("cell: edge vectors are numerically linearly dependent");
  }
}

/// |det(edges)|
inline double volume(const Parallelepiped& cell) {
  validate_cell(cell);
  return std::abs(detail::determinant(cell.edges, cell.dim));
}

/// Affine image of a reference rule on [0,1]^dim: point p = base + edges^T xi,
/// weight w = w_ref * |det(edges)|. Point ordering is preserved.
inline RuleND map_rule(const RuleND& ref, const Parallelepiped& cell) {
  if (ref.dim != cell.dim) {
    throw std::invalid_argument("map_rule: rule dim " + std::to_string(ref.dim) +
                                " != cell dim " + std::to_string(cell.dim));
  }
  validate_cell(cell);
  const auto d = static_cast<std::size_t>(cell.dim);
  const double scale = std::abs(detail::determinant(cell.edges, cell.dim));

  RuleND out;
  out.dim = cell.dim;
  out.points.resize(ref.points.size());
  out.weights.resize(ref.weights.size());
  for (std::size_t i = 0; i < ref.count(); ++i) {
    const double* xi = ref.points.data() + i * d;
    double* p = out.points.data() + i * d;
    for (std::size_t c = 0; c < d; ++c) p[c] = cell.base[c];
    for (std::size_t j = 0; j < d; ++j) {
      const double t = xi[j];
      const double* e = cell.edges.data() + j * d;
      for (std::size_t c = 0; c < d; ++c) p[c] += t * e[c];
    }
    out.weights[i] = ref.weights[i] * scale;
  }
  return out;
}

/// 2^dim uniform children in odometer order: child k has edges = parent
/// edges / 2 and base = parent base + sum_j bit_j(k) * edge_j / 2, where
/// bit 0 advances first. Children tile the parent exactly.
inline std::vector<Parallelepiped> subdivide(const Parallelepiped& cell) {
  validate_cell(cell);
  const auto d = static_cast<std::size_t>(cell.dim);
  std::vector<double> half(cell.edges.size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = cell.edges[i] / 2.0;

  const std::size_t n_children = std::size_t{1} << d;
  std::vector<Parallelepiped> children;
  children.reserve(n_children);
  for (std::size_t k = 0; k < n_children; ++k) {
    Parallelepiped child;
    child.dim = cell.dim;
    child.edges = half;
    child.base = cell.base;
    for (std::size_t j = 0; j < d; ++j) {
      if ((k >> j) & 1u) {
        for (std::size_t c = 0; c < d; ++c) child.base[c] += half[j * d + c];
      }
    }
    children.push_back(std::move(child));
  }
  return children;
}

/// Reference coordinates t with point = base + edges^T t (solved by LU with
/// partial pivoting). The point is inside the cell iff every t_j is in [0,1].
inline std::vector<double> reference_coordinates(const Parallelepiped& cell,
                                                 std::span<const double> point) {
  validate_cell(cell);
  if (point.size() != static_cast<std::size_t>(cell.dim)) {
    throw std::invalid_argument("reference_coordinates: point/cell dim mismatch");
  }
  const auto n = static_cast<std::size_t>(cell.dim);
  // Solve A t = rhs with A(c, j) = edges[j][c].
  std::vector<double> a(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < n; ++c) a[c * n + j] = cell.edges[j * n + c];
  }
  std::vector<double> rhs(n);
  for (std::size_t c = 0; c < n; ++c) rhs[c] = point[c] - cell.base[c];

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      rhs[r] -= f * rhs[col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  std::vector<double> t(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * t[c];
    t[i] = s / a[i * n + i];
  }
  return t;
}

}  // namespace adquad
