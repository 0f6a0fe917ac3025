#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "adquad/adaptive.hpp"
#include "adquad/cell.hpp"
#include "adquad/integrands.hpp"

namespace adquad {

enum class ReferenceSource { closed_form, adaptive };

struct ReferenceIntegral {
  double value = 0.0;
  ReferenceSource source = ReferenceSource::closed_form;
};

/// Reference value for the integral of f over the cell: the registered
/// closed form when the integrand provides one for this cell, otherwise the
/// adaptive rule at tol = 1e-12.
inline ReferenceIntegral reference_integral(const Integrand& f, const Parallelepiped& cell) {
  if (auto closed = f.analytic_integral(cell)) {
    return {*closed, ReferenceSource::closed_form};
  }
  AdaptiveConfig config;
  config.tol = 1e-12;
  const auto values = integrate_adaptive(cell, {&f, 1}, config);
  return {values[0], ReferenceSource::adaptive};
}

struct ConvergenceRecord {
  int points_per_direction = 0;
  std::int64_t total_points = 0;
  double min_dist_to_cusp = 0.0;
  double abs_error = 0.0;
  double integral_value = 0.0;   ///< tensor-rule integral
  double reference_value = 0.0;  ///< abs_error = |integral_value - reference_value|
};

/// Integrates f over the cell with plain tensor-product rules of m points
/// per direction and records the error against reference_integral, together
/// with the minimum distance of the rule points to `cusp`.
inline std::vector<ConvergenceRecord> tensor_convergence_study(const Integrand& f,
                                                               const Parallelepiped& cell,
                                                               std::span<const int> m_values,
                                                               std::span<const double> cusp) {
  if (m_values.empty()) throw std::invalid_argument("tensor_convergence_study: empty m range");
  for (std::size_t i = 1; i < m_values.size(); ++i) {
    if (m_values[i] <= m_values[i - 1]) {
      throw std::invalid_argument("tensor_convergence_study: m range must be increasing");
    }
  }
  if (cusp.size() != static_cast<std::size_t>(cell.dim)) {
    throw std::invalid_argument("tensor_convergence_study: cusp/cell dim mismatch");
  }

  const double reference = reference_integral(f, cell).value;
  std::vector<ConvergenceRecord> records;
  records.reserve(m_values.size());
  for (int m : m_values) {
    const RuleND rule = map_rule(reference_rule(m, cell.dim), cell);
    const double value = integrate_with_rule(rule, f);

    double min_dist2 = std::numeric_limits<double>::infinity();
    const auto d = static_cast<std::size_t>(cell.dim);
    for (std::size_t i = 0; i < rule.count(); ++i) {
      const double* p = rule.points.data() + i * d;
      double r2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double t = p[c] - cusp[c];
        r2 += t * t;
      }
      min_dist2 = std::min(min_dist2, r2);
    }

    ConvergenceRecord rec;
    rec.points_per_direction = m;
    rec.total_points = static_cast<std::int64_t>(rule.count());
    rec.min_dist_to_cusp = std::sqrt(min_dist2);
    rec.abs_error = std::abs(value - reference);
    rec.integral_value = value;
    rec.reference_value = reference;
    records.push_back(rec);
  }
  return records;
}

enum class RateAxis { points_per_direction, min_dist };

/// Least-squares slope of log(abs_error) against log(x). Records whose
/// error has saturated at round-off (below 100 machine epsilons relative to
/// the reference) are excluded before fitting; fewer than three usable
/// records is an error.
inline double fit_rate(std::span<const ConvergenceRecord> records, RateAxis axis) {
  std::vector<double> lx, ly;
  for (const auto& rec : records) {
    const double floor = 100.0 * std::numeric_limits<double>::epsilon() *
                         std::abs(rec.reference_value);
    if (rec.abs_error <= 0.0 || rec.abs_error < floor) continue;
    const double x = axis == RateAxis::points_per_direction
                         ? static_cast<double>(rec.points_per_direction)
                         : rec.min_dist_to_cusp;
    if (!(x > 0.0)) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(rec.abs_error));
  }
  std::vector<double> distinct = lx;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw insufficient_data_error("fit_rate: need at least 3 usable records with distinct x");
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

enum class Strategy { tensor, adaptive };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::tensor ? "tensor" : "adaptive";
}

struct ComparisonRecord {
  Strategy strategy = Strategy::tensor;
  std::int64_t total_points = 0;
  double max_rel_error = 0.0;  ///< max over the family of |I - I_ref| / |I_ref|
};

/// Tensor-product versus adaptive cost comparison for a family of integrands
/// sharing one rule. Tensor records come first (one per m in sweep order),
/// then adaptive records (one per tolerance, each rule built once for the
/// whole family). References come from reference_integral.
inline std::vector<ComparisonRecord> compare_strategies(std::span<const Integrand> family,
                                                        const Parallelepiped& cell,
                                                        std::span<const double> tol_sweep,
                                                        std::span<const int> m_sweep,
                                                        const AdaptiveConfig& base_config = {}) {
  if (family.empty()) throw std::invalid_argument("compare_strategies: empty family");
  if (tol_sweep.empty() || m_sweep.empty()) {
    throw std::invalid_argument("compare_strategies: empty sweep");
  }

  std::vector<double> references;
  references.reserve(family.size());
  for (const auto& f : family) references.push_back(reference_integral(f, cell).value);

  auto family_max_rel_error = [&](const RuleND& rule) {
    double worst = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double value = integrate_with_rule(rule, family[i]);
      worst = std::max(worst, std::abs(value - references[i]) / std::abs(references[i]));
    }
    return worst;
  };

  std::vector<ComparisonRecord> records;
  records.reserve(m_sweep.size() + tol_sweep.size());
  for (int m : m_sweep) {
    const RuleND rule = map_rule(reference_rule(m, cell.dim), cell);
    records.push_back(ComparisonRecord{Strategy::tensor,
                                       static_cast<std::int64_t>(rule.count()),
                                       family_max_rel_error(rule)});
  }
  for (double tol : tol_sweep) {
    AdaptiveConfig config = base_config;
    config.tol = tol;
    const AdaptiveResult result = build_adaptive_rule(cell, family, config);
    records.push_back(ComparisonRecord{Strategy::adaptive,
                                       static_cast<std::int64_t>(result.rule.count()),
                                       family_max_rel_error(result.rule)});
  }
  return records;
}

}  // namespace adquad
