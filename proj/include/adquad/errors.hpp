#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace adquad {

/// Cell edge vectors are (numerically) linearly dependent.
struct degenerate_cell_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An integrand returned NaN or infinity at a quadrature point.
struct nonfinite_integrand_error : std::runtime_error {
  nonfinite_integrand_error(std::string label, std::vector<double> point,
                            const std::string& what)
      : std::runtime_error(what),
        integrand_label(std::move(label)),
        point(std::move(point)) {}

  std::string integrand_label;
  std::vector<double> point;  ///< offending evaluation point
};

/// Recursion hit the depth cap with at least one integrand still failing
/// its tolerance check; typically signals an integrand too singular for
/// the requested tolerance (e.g. a true discontinuity).
struct depth_exceeded_error : std::runtime_error {
  depth_exceeded_error(std::vector<double> cell_base,
                       std::vector<std::size_t> failing, int depth,
                       const std::string& what)
      : std::runtime_error(what),
        cell_base(std::move(cell_base)),
        failing_integrands(std::move(failing)),
        depth(depth) {}

  std::vector<double> cell_base;              ///< base point of the offending cell
  std::vector<std::size_t> failing_integrands;  ///< indices still over tolerance
  int depth;
};

/// Too few usable records for a least-squares rate fit.
struct insufficient_data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CLI / configuration parse failure; message carries the field path.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace adquad
