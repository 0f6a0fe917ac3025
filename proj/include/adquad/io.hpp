#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adquad/adaptive.hpp"
#include "adquad/cell.hpp"
#include "adquad/errors.hpp"
#include "adquad/integrands.hpp"
#include "adquad/studies.hpp"

namespace adquad {

/// 17 significant digits: enough to round-trip binary64 exactly.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, sep)) out.push_back(token);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline double parse_number(const std::string& token, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw config_error(field + ": not a number: '" + token + "'");
  }
}

inline std::vector<double> parse_number_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  for (const auto& token : split(s, ',')) out.push_back(parse_number(token, field));
  return out;
}

inline Parallelepiped cell_from_rows(const std::vector<std::vector<double>>& rows,
                                     const std::string& field) {
  if (rows.empty()) throw config_error(field + ": empty cell specification");
  const std::size_t dim = rows[0].size();
  if (dim == 0) throw config_error(field + ": empty cell row");
  if (dim > static_cast<std::size_t>(kMaxDim)) {
    throw config_error(field + ": cell dimension exceeds " + std::to_string(kMaxDim));
  }
  if (rows.size() != dim + 1) {
    throw config_error(field + ": a " + std::to_string(dim) + "-dimensional cell needs " +
                       std::to_string(dim + 1) + " rows (base + adjacent vertices), got " +
                       std::to_string(rows.size()));
  }
  for (const auto& row : rows) {
    if (row.size() != dim) throw config_error(field + ": ragged cell rows");
  }
  Parallelepiped cell;
  cell.dim = static_cast<int>(dim);
  cell.base = rows[0];
  cell.edges.resize(dim * dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t c = 0; c < dim; ++c) cell.edges[j * dim + c] = rows[j + 1][c] - rows[0][c];
  }
  try {
    validate_cell(cell);
  } catch (const std::exception& e) {
    throw config_error(field + ": " + e.what());
  }
  return cell;
}

}  // namespace detail

/// Cell specifications: named shortcuts (`unitsquare`, `unitcubeN`, `symN`
/// for [-1,1]^N), inline rows `b1,..,bn;v1;..;vn` (base then the n adjacent
/// vertices), or `@file` with one row per line.
inline Parallelepiped parse_cell(const std::string& spec, const std::string& field = "cell") {
  if (spec == "unitsquare") return unit_cube(2);
  auto named = [&](const std::string& prefix) -> std::optional<int> {
    if (spec.size() != prefix.size() + 1 || spec.compare(0, prefix.size(), prefix) != 0)
      return std::nullopt;
    const char c = spec.back();
    if (c < '1' || c > '0' + kMaxDim) {
      throw config_error(field + ": dimension suffix in '" + spec + "' must be 1.." +
                         std::to_string(kMaxDim));
    }
    return c - '0';
  };
  if (auto dim = named("unitcube")) return unit_cube(*dim);
  if (auto dim = named("sym")) return symmetric_cube(*dim);

  std::vector<std::vector<double>> rows;
  if (!spec.empty() && spec[0] == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw config_error(field + ": cannot open cell file '" + spec.substr(1) + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<double> row;
      std::istringstream ls(line);
      std::string token;
      while (ls >> token) row.push_back(detail::parse_number(token, field));
      rows.push_back(std::move(row));
    }
  } else {
    for (const auto& part : detail::split(spec, ';')) {
      rows.push_back(detail::parse_number_list(part, field));
    }
  }
  return detail::cell_from_rows(rows, field);
}

inline Interface2D parse_interface(const std::string& name, const std::string& field = "interface") {
  if (name == "straight") return Interface2D::straight();
  if (name == "kinked") return Interface2D::kinked();
  if (name == "quadratic") return Interface2D::quadratic();
  throw config_error(field + ": unknown interface '" + name +
                     "' (known: straight, kinked, quadratic)");
}

/// Integrand specifications, `name[:param,param,...]`:
///   constant:VALUE
///   gaussian:AMPLITUDE,ALPHA,C1,...,Cdim
///   linear_cusp
///   exp_cusp:ALPHA
///   heaviside:INTERFACE,EPS            (2-D cells)
///   heaviside_family:INTERFACE,H       (2-D cells; expands to 5 integrands)
inline std::vector<Integrand> parse_integrand_spec(const std::string& spec, int dim,
                                                   const std::string& field) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto numbers = [&]() { return detail::parse_number_list(params, field); };
  auto require_dim2 = [&]() {
    if (dim != 2) throw config_error(field + ": '" + name + "' requires a 2-dimensional cell");
  };

  try {
    if (name == "constant") {
      const auto p = numbers();
      if (p.size() != 1) throw config_error(field + ": constant takes 1 parameter");
      return {constant(dim, p[0])};
    }
    if (name == "gaussian") {
      const auto p = numbers();
      if (p.size() != static_cast<std::size_t>(dim) + 2) {
        throw config_error(field + ": gaussian takes amplitude, alpha and " +
                           std::to_string(dim) + " center coordinates");
      }
      return {gaussian_bump(p[0], p[1], {p.begin() + 2, p.end()})};
    }
    if (name == "linear_cusp") {
      if (!params.empty()) throw config_error(field + ": linear_cusp takes no parameters");
      return {linear_cusp(dim)};
    }
    if (name == "exp_cusp") {
      const auto p = numbers();
      if (p.size() != 1) throw config_error(field + ": exp_cusp takes 1 parameter (alpha)");
      return {exp_cusp(p[0], dim)};
    }
    if (name == "heaviside") {
      require_dim2();
      const auto p = detail::split(params, ',');
      if (p.size() != 2) throw config_error(field + ": heaviside takes interface, eps");
      return {heaviside_integrand(parse_interface(p[0], field),
                                  detail::parse_number(p[1], field))};
    }
    if (name == "heaviside_family") {
      require_dim2();
      const auto p = detail::split(params, ',');
      if (p.size() != 2) throw config_error(field + ": heaviside_family takes interface, h");
      return heaviside_family(parse_interface(p[0], field), detail::parse_number(p[1], field));
    }
  } catch (const std::invalid_argument& e) {
    throw config_error(field + ": " + e.what());
  }
  throw config_error(field + ": unknown integrand '" + name +
                     "' (known: constant, gaussian, linear_cusp, exp_cusp, heaviside, "
                     "heaviside_family)");
}

inline std::vector<Integrand> parse_integrands(std::span<const std::string> specs, int dim) {
  std::vector<Integrand> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto batch = parse_integrand_spec(specs[i], dim, "fn[" + std::to_string(i) + "]");
    for (auto& f : batch) out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule files

/// Serialized form of an adaptive rule with its construction metadata.
struct RuleFile {
  RuleND rule;
  std::int64_t leaf_count = 0;
  double tol = 0.0;
  std::string comparator = ">=";
};

inline RuleFile to_rule_file(const AdaptiveResult& result, const AdaptiveConfig& config) {
  return RuleFile{result.rule, result.leaf_count, config.tol,
                  comparator_name(config.comparator)};
}

/// CSV layout: header row `dim,count`, then one `x1,...,xn,w` row per point
/// in rule order, every value at 17 significant digits.
inline void write_rule_csv(std::ostream& os, const RuleND& rule) {
  os << rule.dim << "," << rule.count() << "\n";
  const auto d = static_cast<std::size_t>(rule.dim);
  for (std::size_t i = 0; i < rule.count(); ++i) {
    const double* p = rule.points.data() + i * d;
    for (std::size_t c = 0; c < d; ++c) os << format_double(p[c]) << ",";
    os << format_double(rule.weights[i]) << "\n";
  }
}

inline RuleND read_rule_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw config_error("rule csv: missing header");
  const auto header = detail::split(line, ',');
  if (header.size() != 2) throw config_error("rule csv: header must be 'dim,count'");
  const int dim = static_cast<int>(detail::parse_number(header[0], "rule csv dim"));
  const auto count = static_cast<std::size_t>(detail::parse_number(header[1], "rule csv count"));
  RuleND rule;
  rule.dim = dim;
  rule.points.reserve(count * static_cast<std::size_t>(dim));
  rule.weights.reserve(count);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != static_cast<std::size_t>(dim) + 1) {
      throw config_error("rule csv: expected " + std::to_string(dim + 1) + " columns");
    }
    for (int c = 0; c < dim; ++c) {
      rule.points.push_back(detail::parse_number(cols[static_cast<std::size_t>(c)], "rule csv point"));
    }
    rule.weights.push_back(detail::parse_number(cols.back(), "rule csv weight"));
  }
  if (rule.count() != count) {
    throw config_error("rule csv: header count " + std::to_string(count) + " != " +
                       std::to_string(rule.count()) + " rows");
  }
  return rule;
}

inline void write_rule_json(std::ostream& os, const RuleFile& file) {
  nlohmann::json j;
  j["dim"] = file.rule.dim;
  j["leaf_count"] = file.leaf_count;
  j["tol"] = file.tol;
  j["comparator"] = file.comparator;
  j["weights"] = file.rule.weights;
  auto& points = j["points"] = nlohmann::json::array();
  const auto d = static_cast<std::size_t>(file.rule.dim);
  for (std::size_t i = 0; i < file.rule.count(); ++i) {
    const double* p = file.rule.points.data() + i * d;
    points.push_back(std::vector<double>(p, p + d));
  }
  os << j.dump(2) << "\n";
}

inline RuleFile read_rule_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("rule json: ") + e.what());
  }
  try {
    RuleFile file;
    file.rule.dim = j.at("dim").get<int>();
    file.leaf_count = j.at("leaf_count").get<std::int64_t>();
    file.tol = j.at("tol").get<double>();
    file.comparator = j.at("comparator").get<std::string>();
    file.rule.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& p : j.at("points")) {
      const auto coords = p.get<std::vector<double>>();
      if (coords.size() != static_cast<std::size_t>(file.rule.dim)) {
        throw config_error("rule json: point arity mismatch");
      }
      file.rule.points.insert(file.rule.points.end(), coords.begin(), coords.end());
    }
    if (file.rule.points.size() != file.rule.weights.size() * static_cast<std::size_t>(file.rule.dim)) {
      throw config_error("rule json: points/weights length mismatch");
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("rule json: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Study files

inline void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRecord> records) {
  os << "m,total_points,min_dist,abs_error\n";
  for (const auto& r : records) {
    os << r.points_per_direction << "," << r.total_points << ","
       << format_double(r.min_dist_to_cusp) << "," << format_double(r.abs_error) << "\n";
  }
}

inline void write_comparison_csv(std::ostream& os, std::span<const ComparisonRecord> records) {
  os << "strategy,total_points,max_rel_error\n";
  for (const auto& r : records) {
    os << strategy_name(r.strategy) << "," << r.total_points << ","
       << format_double(r.max_rel_error) << "\n";
  }
}

inline void write_convergence_json(std::ostream& os, std::span<const ConvergenceRecord> records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["m"] = r.points_per_direction;
    j["total_points"] = r.total_points;
    j["min_dist"] = r.min_dist_to_cusp;
    j["abs_error"] = r.abs_error;
    j["value"] = r.integral_value;
    j["reference"] = r.reference_value;
    out.push_back(std::move(j));
  }
  os << out.dump(2) << "\n";
}

inline void write_comparison_json(std::ostream& os, std::span<const ComparisonRecord> records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["strategy"] = strategy_name(r.strategy);
    j["total_points"] = r.total_points;
    j["max_rel_error"] = r.max_rel_error;
    out.push_back(std::move(j));
  }
  os << out.dump(2) << "\n";
}

/// Relative output paths are placed under $ADQUAD_OUT_DIR when it is set;
/// "-" (stdout) and absolute paths pass through.
inline std::string resolve_out_path(const std::string& path) {
  if (path == "-" || path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("ADQUAD_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  std::string joined(dir);
  if (joined.back() != '/') joined += '/';
  return joined + path;
}

}  // namespace adquad
