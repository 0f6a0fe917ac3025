#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adquad/cell.hpp"
#include "adquad/errors.hpp"
#include "adquad/gauss.hpp"
#include "adquad/integrands.hpp"

namespace adquad {

/// Which side of the tolerance forces a subdivision. The reference scheme
/// subdivides on err >= tol; the strict variant exists for sensitivity
/// checks of published point counts.
enum class Comparator { subdivide_on_ge, subdivide_on_gt };

inline const char* comparator_name(Comparator c) {
  return c == Comparator::subdivide_on_ge ? ">=" : ">";
}

struct AdaptiveConfig {
  int nsp_low = 5;    ///< points per direction of the emitted local rule
  int nsp_high = 8;   ///< points per direction of the error-reference rule
  double tol = 1e-6;  ///< absolute per-integrand, per-cell tolerance
  int max_depth = 30;
  Comparator comparator = Comparator::subdivide_on_ge;
};

inline void validate_config(const AdaptiveConfig& config) {
  if (config.nsp_low < 1) throw std::invalid_argument("AdaptiveConfig: nsp_low must be >= 1");
  if (config.nsp_high <= config.nsp_low) {
    throw std::invalid_argument("AdaptiveConfig: nsp_high must exceed nsp_low");
  }
  if (!(config.tol > 0.0)) throw std::invalid_argument("AdaptiveConfig: tol must be > 0");
  if (config.max_depth < 1) throw std::invalid_argument("AdaptiveConfig: max_depth must be >= 1");
}

struct AdaptiveResult {
  RuleND rule;  ///< concatenated leaf rules, depth-first in odometer child order
  std::int64_t leaf_count = 0;
  int max_depth_reached = 0;
  /// Per input integrand: number of leaves at which it was still active
  /// (had not yet passed the tolerance on an ancestor).
  std::vector<std::int64_t> per_integrand_active_leaves;
};

namespace detail {

/// Compensated (Kahan-Neumaier) accumulator; keeps weight sums and integrals
/// accurate for rules with millions of points.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void check_finite(const Integrand& f, const RuleND& rule,
                         std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const auto p = rule.point(i);
      std::ostringstream msg;
      msg << "integrand '" << f.label() << "' returned a non-finite value at (";
      for (std::size_t c = 0; c < p.size(); ++c) msg << (c ? ", " : "") << p[c];
      msg << ")";
      throw nonfinite_integrand_error(f.label(), {p.begin(), p.end()}, msg.str());
    }
  }
}

inline double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  KahanSum acc;
  for (std::size_t i = 0; i < weights.size(); ++i) acc.add(weights[i] * values[i]);
  return acc.value();
}

}  // namespace detail

/// sum_i w_i f(p_i) with batched evaluation; throws nonfinite_integrand_error
/// if f produces NaN or infinity anywhere on the rule.
inline double integrate_with_rule(const RuleND& rule, const Integrand& f) {
  if (rule.count() == 0) throw std::invalid_argument("integrate_with_rule: empty rule");
  if (rule.dim != f.dim()) {
    throw std::invalid_argument("integrate_with_rule: rule dim != integrand dim");
  }
  std::vector<double> values(rule.count());
  f.evaluate(rule.points, values);
  detail::check_finite(f, rule, values);
  return detail::weighted_sum(rule.weights, values);
}

/// |I_high - I_low| for a pair of rules already mapped onto the same cell.
inline double local_error(const Integrand& f, const RuleND& low_mapped,
                          const RuleND& high_mapped) {
  return std::abs(integrate_with_rule(high_mapped, f) - integrate_with_rule(low_mapped, f));
}

/// Convenience overload: maps the configured low/high reference rules onto
/// `cell` and returns the error estimate there.
inline double local_error(const Integrand& f, const Parallelepiped& cell,
                          const AdaptiveConfig& config) {
  validate_config(config);
  const RuleND low = map_rule(reference_rule(config.nsp_low, cell.dim), cell);
  const RuleND high = map_rule(reference_rule(config.nsp_high, cell.dim), cell);
  return local_error(f, low, high);
}

namespace detail {

inline bool needs_subdivision(double err, const AdaptiveConfig& config) {
  return config.comparator == Comparator::subdivide_on_ge ? err >= config.tol
                                                          : err > config.tol;
}

struct TraversalStats {
  std::int64_t leaf_count = 0;
  int max_depth_reached = 0;
  std::vector<std::int64_t> per_integrand_active_leaves;
};

/// Depth-first traversal over an explicit work list of
/// (cell, active integrand set, depth). Children are visited in odometer
/// order, so leaf emission order is independent of call-stack behavior.
/// The sink is invoked once per leaf with the mapped low-order rule, the
/// active indices, and the low-rule integrals of the active integrands.
template <typename LeafSink>
TraversalStats traverse_adaptive(const Parallelepiped& root, std::span<const Integrand> fs,
                                 const AdaptiveConfig& config, LeafSink&& sink) {
  validate_config(config);
  validate_cell(root);
  if (fs.empty()) throw std::invalid_argument("build_adaptive_rule: no integrands");
  for (const auto& f : fs) {
    if (f.dim() != root.dim) {
      throw std::invalid_argument("build_adaptive_rule: integrand '" + f.label() +
                                  "' dim != cell dim");
    }
  }

  const RuleND ref_low = reference_rule(config.nsp_low, root.dim);
  const RuleND ref_high = reference_rule(config.nsp_high, root.dim);

  TraversalStats stats;
  stats.per_integrand_active_leaves.assign(fs.size(), 0);

  struct Frame {
    Parallelepiped cell;
    std::vector<std::size_t> active;
    int depth;
  };
  std::vector<Frame> stack;
  {
    std::vector<std::size_t> all(fs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    stack.push_back(Frame{root, std::move(all), 0});
  }

  std::vector<double> vals_low, vals_high;
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();

    const RuleND low = map_rule(ref_low, frame.cell);
    const RuleND high = map_rule(ref_high, frame.cell);

    std::vector<std::size_t> failing;
    std::vector<double> low_integrals(frame.active.size());
    vals_low.resize(low.count());
    vals_high.resize(high.count());
    for (std::size_t k = 0; k < frame.active.size(); ++k) {
      const Integrand& f = fs[frame.active[k]];
      f.evaluate(low.points, vals_low);
      check_finite(f, low, vals_low);
      f.evaluate(high.points, vals_high);
      check_finite(f, high, vals_high);
      const double i_low = weighted_sum(low.weights, vals_low);
      const double i_high = weighted_sum(high.weights, vals_high);
      low_integrals[k] = i_low;
      if (needs_subdivision(std::abs(i_high - i_low), config)) {
        failing.push_back(frame.active[k]);
      }
    }

    if (failing.empty()) {
      stats.leaf_count += 1;
      stats.max_depth_reached = std::max(stats.max_depth_reached, frame.depth);
      for (std::size_t idx : frame.active) stats.per_integrand_active_leaves[idx] += 1;
      sink(frame.cell, low, std::span<const std::size_t>(frame.active),
           std::span<const double>(low_integrals), frame.depth);
      continue;
    }

    if (frame.depth >= config.max_depth) {
      std::ostringstream msg;
      msg << "adaptive subdivision exceeded max_depth=" << config.max_depth
          << " with " << failing.size() << " integrand(s) still failing:";
      for (std::size_t idx : failing) msg << " '" << fs[idx].label() << "'";
      throw depth_exceeded_error(frame.cell.base, std::move(failing), frame.depth, msg.str());
    }

    std::vector<Parallelepiped> children = subdivide(frame.cell);
    // Pushed in reverse so the LIFO pops them in odometer order.
    for (std::size_t k = children.size(); k-- > 0;) {
      stack.push_back(Frame{std::move(children[k]), failing, frame.depth + 1});
    }
  }
  return stats;
}

}  // namespace detail

/// The recursive quadrature construction: a cell whose every active
/// integrand has |I_high - I_low| within tolerance contributes its mapped
/// low-order rule; otherwise the cell splits into 2^dim uniform children and
/// only the failing integrands are carried down (integrand dropout).
inline AdaptiveResult build_adaptive_rule(const Parallelepiped& cell,
                                          std::span<const Integrand> integrands,
                                          const AdaptiveConfig& config) {
  AdaptiveResult result;
  result.rule.dim = cell.dim;
  auto stats = detail::traverse_adaptive(
      cell, integrands, config,
      [&result](const Parallelepiped&, const RuleND& low, std::span<const std::size_t>,
                std::span<const double>, int) {
        result.rule.points.insert(result.rule.points.end(), low.points.begin(),
                                  low.points.end());
        result.rule.weights.insert(result.rule.weights.end(), low.weights.begin(),
                                   low.weights.end());
      });
  result.leaf_count = stats.leaf_count;
  result.max_depth_reached = stats.max_depth_reached;
  result.per_integrand_active_leaves = std::move(stats.per_integrand_active_leaves);
  return result;
}

/// Integrals of every integrand under the adaptive rule, accumulated leaf by
/// leaf without materializing the concatenated rule. Matches integrating
/// with build_adaptive_rule(...).rule up to compensated-summation grouping.
inline std::vector<double> integrate_adaptive(const Parallelepiped& cell,
                                              std::span<const Integrand> integrands,
                                              const AdaptiveConfig& config) {
  std::vector<detail::KahanSum> totals(integrands.size());
  std::vector<double> values;
  detail::traverse_adaptive(
      cell, integrands, config,
      [&](const Parallelepiped&, const RuleND& low, std::span<const std::size_t> active,
          std::span<const double> low_integrals, int) {
        std::vector<bool> is_active(integrands.size(), false);
        for (std::size_t k = 0; k < active.size(); ++k) {
          is_active[active[k]] = true;
          totals[active[k]].add(low_integrals[k]);
        }
        for (std::size_t i = 0; i < integrands.size(); ++i) {
          if (is_active[i]) continue;
          values.resize(low.count());
          integrands[i].evaluate(low.points, values);
          detail::check_finite(integrands[i], low, values);
          totals[i].add(detail::weighted_sum(low.weights, values));
        }
      });
  std::vector<double> out(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) out[i] = totals[i].value();
  return out;
}

/// Visits every leaf of the adaptive subdivision with its cell, the active
/// integrand indices, and the depth. Used for instrumentation and for
/// checking the per-leaf tolerance certificate.
inline void for_each_leaf(
    const Parallelepiped& cell, std::span<const Integrand> integrands,
    const AdaptiveConfig& config,
    const std::function<void(const Parallelepiped&, std::span<const std::size_t>, int)>& visit) {
  detail::traverse_adaptive(cell, integrands, config,
                            [&](const Parallelepiped& leaf, const RuleND&,
                                std::span<const std::size_t> active, std::span<const double>,
                                int depth) { visit(leaf, active, depth); });
}

}  // namespace adquad
