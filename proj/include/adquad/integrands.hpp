#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adquad/cell.hpp"

namespace adquad {

using BatchEvaluator = std::function<void(std::span<const double> points, std::span<double> values)>;
using AnalyticIntegral = std::function<std::optional<double>(const Parallelepiped&)>;

/// Scalar field R^dim -> R with a batch-evaluation contract: `points` holds
/// values.size() points of `dim` coordinates each, stored flat. Evaluators
/// must be deterministic and stateless, so batches can be split or merged
/// freely and integrands shared across threads.
class Integrand {
 public:
  Integrand() = default;
  Integrand(int dim, std::string label, BatchEvaluator eval, AnalyticIntegral analytic = {})
      : dim_(dim), label_(std::move(label)), eval_(std::move(eval)),
        analytic_(std::move(analytic)) {
    if (dim_ < 1) throw std::invalid_argument("Integrand: dim must be >= 1");
    if (!eval_) throw std::invalid_argument("Integrand: evaluator is empty");
  }

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }

  void evaluate(std::span<const double> points, std::span<double> values) const {
    if (points.size() != values.size() * static_cast<std::size_t>(dim_)) {
      throw std::invalid_argument("Integrand::evaluate: size mismatch for '" + label_ + "'");
    }
    eval_(points, values);
  }

  double operator()(std::span<const double> point) const {
    double v = 0.0;
    evaluate(point, {&v, 1});
    return v;
  }

  /// Closed-form integral over `cell` when one is registered for this
  /// integrand/cell combination, otherwise nullopt.
  std::optional<double> analytic_integral(const Parallelepiped& cell) const {
    if (!analytic_) return std::nullopt;
    return analytic_(cell);
  }

 private:
  int dim_ = 0;
  std::string label_;
  BatchEvaluator eval_;
  AnalyticIntegral analytic_;
};

namespace detail {

inline bool is_axis_aligned(const Parallelepiped& cell) {
  const auto d = static_cast<std::size_t>(cell.dim);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t c = 0; c < d; ++c) {
      if (j != c && cell.edges[j * d + c] != 0.0) return false;
    }
  }
  return true;
}

inline bool is_symmetric_cube(const Parallelepiped& cell) {
  const auto d = static_cast<std::size_t>(cell.dim);
  for (std::size_t c = 0; c < d; ++c) {
    if (std::abs(cell.base[c] + 1.0) > 1e-14) return false;
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t c = 0; c < d; ++c) {
      const double want = (j == c) ? 2.0 : 0.0;
      if (std::abs(cell.edges[j * d + c] - want) > 1e-14) return false;
    }
  }
  return true;
}

}  // namespace detail

/// f(x) = value
inline Integrand constant(int dim, double value) {
  std::ostringstream label;
  label << "constant(" << value << ")";
  return Integrand(
      dim, label.str(),
      [value](std::span<const double>, std::span<double> out) {
        for (auto& v : out) v = value;
      },
      [value](const Parallelepiped& cell) -> std::optional<double> {
        return value * volume(cell);
      });
}

/// f(x) = amplitude * exp(-alpha * ||x - center||^2). The closed form over
/// axis-aligned cells is the per-axis erf product.
inline Integrand gaussian_bump(double amplitude, double alpha, std::vector<double> center) {
  if (alpha <= 0.0) throw std::invalid_argument("gaussian_bump: alpha must be > 0");
  if (center.empty()) throw std::invalid_argument("gaussian_bump: empty center");
  const int dim = static_cast<int>(center.size());
  std::ostringstream label;
  label << "gaussian(" << amplitude << "," << alpha;
  for (double c : center) label << "," << c;
  label << ")";

  auto eval = [amplitude, alpha, center](std::span<const double> pts, std::span<double> out) {
    const std::size_t d = center.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double* p = pts.data() + i * d;
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double t = p[c] - center[c];
        r2 += t * t;
      }
      out[i] = amplitude * std::exp(-alpha * r2);
    }
  };
  auto analytic = [amplitude, alpha, center](const Parallelepiped& cell) -> std::optional<double> {
    if (!detail::is_axis_aligned(cell)) return std::nullopt;
    const auto d = static_cast<std::size_t>(cell.dim);
    const double s = std::sqrt(alpha);
    double value = amplitude;
    for (std::size_t c = 0; c < d; ++c) {
      const double e = cell.edges[c * d + c];
      const double lo = std::min(cell.base[c], cell.base[c] + e);
      const double hi = std::max(cell.base[c], cell.base[c] + e);
      value *= 0.5 * std::sqrt(std::numbers::pi / alpha) *
               (std::erf(s * (hi - center[c])) - std::erf(s * (lo - center[c])));
    }
    return value;
  };
  return Integrand(dim, label.str(), std::move(eval), std::move(analytic));
}

/// f(x) = 1 - ||x||, a C^0 cusp at the origin. Closed forms are registered
/// for [-1,1]^1 and [-1,1]^2.
inline Integrand linear_cusp(int dim) {
  auto eval = [dim](std::span<const double> pts, std::span<double> out) {
    const auto d = static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double* p = pts.data() + i * d;
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) r2 += p[c] * p[c];
      out[i] = 1.0 - std::sqrt(r2);
    }
  };
  auto analytic = [](const Parallelepiped& cell) -> std::optional<double> {
    if (!detail::is_symmetric_cube(cell)) return std::nullopt;
    if (cell.dim == 1) return 1.0;
    if (cell.dim == 2) {
      // 4 - integral of r over [-1,1]^2 = 4 - (4/3)(sqrt(2) + ln(1 + sqrt(2)))
      const double rt2 = std::sqrt(2.0);
      return 4.0 - (4.0 / 3.0) * (rt2 + std::log(1.0 + rt2));
    }
    return std::nullopt;
  };
  return Integrand(dim, "linear_cusp", std::move(eval), std::move(analytic));
}

/// f(x) = exp(-alpha * ||x||), a C^0 cusp at the origin. A closed form is
/// registered for one-dimensional cells.
inline Integrand exp_cusp(double alpha, int dim) {
  if (alpha <= 0.0) throw std::invalid_argument("exp_cusp: alpha must be > 0");
  std::ostringstream label;
  label << "exp_cusp(" << alpha << ")";

  auto eval = [alpha, dim](std::span<const double> pts, std::span<double> out) {
    const auto d = static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double* p = pts.data() + i * d;
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) r2 += p[c] * p[c];
      out[i] = std::exp(-alpha * std::sqrt(r2));
    }
  };
  auto analytic = [alpha](const Parallelepiped& cell) -> std::optional<double> {
    if (cell.dim != 1) return std::nullopt;
    const double a = std::min(cell.base[0], cell.base[0] + cell.edges[0]);
    const double b = std::max(cell.base[0], cell.base[0] + cell.edges[0]);
    auto antideriv = [alpha](double lo, double hi) {  // over [lo, hi] with 0 <= lo
      return (std::exp(-alpha * lo) - std::exp(-alpha * hi)) / alpha;
    };
    if (a >= 0.0) return antideriv(a, b);
    if (b <= 0.0) return antideriv(-b, -a);
    return antideriv(0.0, -a) + antideriv(0.0, b);
  };
  return Integrand(dim, label.str(), std::move(eval), std::move(analytic));
}

/// Regularized Heaviside ramp: 0 for phi < -eps, 1 for phi > eps, and in
/// between the C^4 polynomial
///   (128 + 315 u - 420 u^3 + 378 u^5 - 180 u^7 + 35 u^9) / 256,  u = phi/eps,
/// evaluated in Horner form in u so tiny eps cannot underflow.
inline double regularized_heaviside(double phi, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("regularized_heaviside: eps must be > 0");
  if (phi < -eps) return 0.0;
  if (phi > eps) return 1.0;
  const double u = phi / eps;
  const double u2 = u * u;
  const double poly = 315.0 + u2 * (-420.0 + u2 * (378.0 + u2 * (-180.0 + u2 * 35.0)));
  return (128.0 + u * poly) / 256.0;
}

/// k-th derivative (k = 1..4) of the regularized Heaviside with respect to
/// phi. The first derivative is (315/(256 eps)) (1 - u^2)^4; higher ones
/// differentiate that polynomial exactly via its coefficient array.
inline double regularized_heaviside_derivative(double phi, double eps, int k) {
  if (eps <= 0.0) throw std::invalid_argument("regularized_heaviside_derivative: eps must be > 0");
  if (k < 1 || k > 4) throw std::invalid_argument("regularized_heaviside_derivative: k must be 1..4");
  if (phi < -eps || phi > eps) return 0.0;
  // g(u) = (1 - u^2)^4, coefficients of u^0..u^8.
  std::array<double, 9> g{1, 0, -4, 0, 6, 0, -4, 0, 1};
  int deg = 8;
  for (int d = 0; d < k - 1; ++d) {
    for (int i = 0; i < deg; ++i) g[static_cast<std::size_t>(i)] = (i + 1) * g[static_cast<std::size_t>(i + 1)];
    g[static_cast<std::size_t>(deg)] = 0.0;
    --deg;
  }
  const double u = phi / eps;
  double val = 0.0;
  for (int i = deg; i >= 0; --i) val = val * u + g[static_cast<std::size_t>(i)];
  return val * (315.0 / 256.0) / std::pow(eps, k);
}

/// Two-dimensional interface with a signed distance function. Three kinds:
///  - straight: the line through two points,
///  - kinked:   a two-segment polyline, strictly increasing in y,
///  - quadratic: the graph y = c0 + c1 x + c2 x^2.
struct Interface2D {
  enum class Kind { straight, kinked, quadratic };

  Kind kind = Kind::straight;
  std::vector<std::array<double, 2>> vertices;  // straight: 2 points, kinked: 3
  std::array<double, 3> coeffs{0, 0, 0};        // quadratic only

  static Interface2D straight(std::array<double, 2> p0 = {0.55, 0.0},
                              std::array<double, 2> p1 = {0.35, 1.0}) {
    if (p0 == p1) throw std::invalid_argument("Interface2D::straight: coincident points");
    Interface2D s;
    s.kind = Kind::straight;
    s.vertices = {p0, p1};
    return s;
  }

  static Interface2D kinked(std::array<double, 2> v0 = {0.55, 0.0},
                            std::array<double, 2> v1 = {0.45, 0.5},
                            std::array<double, 2> v2 = {0.62, 1.0}) {
    if (!(v0[1] < v1[1] && v1[1] < v2[1])) {
      throw std::invalid_argument("Interface2D::kinked: vertices must be strictly increasing in y");
    }
    Interface2D s;
    s.kind = Kind::kinked;
    s.vertices = {v0, v1, v2};
    return s;
  }

  /// Default curve is y = 0.5 + 0.3 (x - 0.5)^2.
  static Interface2D quadratic(std::array<double, 3> coeffs = {0.575, -0.3, 0.3}) {
    Interface2D s;
    s.kind = Kind::quadratic;
    s.coeffs = coeffs;
    return s;
  }
};

namespace detail {

inline double point_segment_distance(std::array<double, 2> p, std::array<double, 2> a,
                                     std::array<double, 2> b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p[0] - (a[0] + t * dx), ey = p[1] - (a[1] + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

/// x-coordinate of the y-monotone polyline at height y (clamped to the ends).
inline double polyline_x_at(const std::vector<std::array<double, 2>>& v, double y) {
  if (y <= v.front()[1]) {
    const auto &a = v[0], &b = v[1];
    return a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (y <= v[i + 1][1]) {
      const auto &a = v[i], &b = v[i + 1];
      return a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
    }
  }
  const auto &a = v[v.size() - 2], &b = v.back();
  return a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
}

/// Nearest parameter on the graph y = q(t) to point p: the critical points
/// of the squared distance solve a cubic; each sign change of its derivative
/// is bracketed by a scan, bisected, and Newton-polished.
inline double quadratic_nearest_parameter(const std::array<double, 3>& c,
                                          std::array<double, 2> p) {
  auto q = [&](double t) { return c[0] + t * (c[1] + t * c[2]); };
  auto dq = [&](double t) { return c[1] + 2.0 * c[2] * t; };
  auto dist2 = [&](double t) {
    const double ex = t - p[0], ey = q(t) - p[1];
    return ex * ex + ey * ey;
  };
  auto g = [&](double t) { return (t - p[0]) + (q(t) - p[1]) * dq(t); };  // dist2' / 2
  auto dg = [&](double t) { return 1.0 + dq(t) * dq(t) + (q(t) - p[1]) * 2.0 * c[2]; };

  // The vertical distance bounds how far the minimizer can sit from p.x.
  const double radius = std::abs(p[1] - q(p[0])) + 1.0;
  const double lo = p[0] - radius, hi = p[0] + radius;

  double best_t = p[0];
  double best = dist2(best_t);
  const int n_scan = 256;
  double prev_t = lo, prev_g = g(lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double t = lo + (hi - lo) * i / n_scan;
    const double gt = g(t);
    if ((prev_g <= 0.0 && gt >= 0.0) || (prev_g >= 0.0 && gt <= 0.0)) {
      double a = prev_t, b = t, ga = prev_g;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if ((ga <= 0.0) == (gm <= 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      double root = 0.5 * (a + b);
      for (int it = 0; it < 3; ++it) {
        const double denom = dg(root);
        if (denom != 0.0) root -= g(root) / denom;
      }
      if (dist2(root) < best) {
        best = dist2(root);
        best_t = root;
      }
    }
    prev_t = t;
    prev_g = gt;
  }
  for (double t : {lo, hi}) {
    if (dist2(t) < best) {
      best = dist2(t);
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace detail

/// Signed distance from `point` to the interface. Straight interfaces use
/// the exact line distance with the normal obtained by rotating p1 - p0
/// clockwise; y-monotone kinds (kinked, and the side test of quadratic uses
/// above/below) take their sign from which side of the curve the point is.
inline double signed_distance(const Interface2D& interface, std::array<double, 2> point) {
  switch (interface.kind) {
    case Interface2D::Kind::straight: {
      const auto& a = interface.vertices[0];
      const auto& b = interface.vertices[1];
      const double dx = b[0] - a[0], dy = b[1] - a[1];
      const double len = std::sqrt(dx * dx + dy * dy);
      // unit normal (dy, -dx)/len
      return ((point[0] - a[0]) * dy - (point[1] - a[1]) * dx) / len;
    }
    case Interface2D::Kind::kinked: {
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < interface.vertices.size(); ++i) {
        dist = std::min(dist, detail::point_segment_distance(point, interface.vertices[i],
                                                             interface.vertices[i + 1]));
      }
      const double side = point[0] - detail::polyline_x_at(interface.vertices, point[1]);
      return side >= 0.0 ? dist : -dist;
    }
    case Interface2D::Kind::quadratic: {
      const auto& c = interface.coeffs;
      const double t = detail::quadratic_nearest_parameter(c, point);
      const double ex = point[0] - t;
      const double ey = point[1] - (c[0] + t * (c[1] + t * c[2]));
      const double dist = std::sqrt(ex * ex + ey * ey);
      const double side = point[1] - (c[0] + point[0] * (c[1] + point[0] * c[2]));
      return side >= 0.0 ? dist : -dist;
    }
  }
  throw std::logic_error("signed_distance: unknown interface kind");
}

inline std::string interface_name(const Interface2D& interface) {
  switch (interface.kind) {
    case Interface2D::Kind::straight: return "straight";
    case Interface2D::Kind::kinked: return "kinked";
    case Interface2D::Kind::quadratic: return "quadratic";
  }
  return "?";
}

/// psi(phi(x), eps) over R^2.
inline Integrand heaviside_integrand(const Interface2D& interface, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("heaviside_integrand: eps must be > 0");
  std::ostringstream label;
  label << "heaviside(" << interface_name(interface) << "," << eps << ")";
  auto eval = [interface, eps](std::span<const double> pts, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::array<double, 2> p{pts[2 * i], pts[2 * i + 1]};
      out[i] = regularized_heaviside(signed_distance(interface, p), eps);
    }
  };
  return Integrand(2, label.str(), std::move(eval));
}

inline constexpr std::array<double, 5> kHeavisideEpsOverH{2.5, 0.85, 0.265, 0.085, 0.0225};

/// The five-member regularized Heaviside family with eps_k = h * {2.5, 0.85,
/// 0.265, 0.085, 0.0225}, sharpest last.
inline std::vector<Integrand> heaviside_family(const Interface2D& interface, double h) {
  if (h <= 0.0) throw std::invalid_argument("heaviside_family: h must be > 0");
  std::vector<Integrand> family;
  family.reserve(kHeavisideEpsOverH.size());
  for (double ratio : kHeavisideEpsOverH) {
    family.push_back(heaviside_integrand(interface, ratio * h));
  }
  return family;
}

}  // namespace adquad
