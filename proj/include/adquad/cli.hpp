#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adquad/adaptive.hpp"
#include "adquad/errors.hpp"
#include "adquad/io.hpp"
#include "adquad/studies.hpp"

namespace adquad {

struct RunConfig {
  enum class Command { rule, integrate, converge, compare };
  enum class Format { csv, json };

  Command command = Command::rule;
  Parallelepiped cell;
  std::vector<Integrand> integrands;
  AdaptiveConfig adaptive;

  // converge
  std::vector<int> m_values;
  std::vector<double> cusp;
  bool fit_even_only = true;

  // compare
  std::vector<double> tol_sweep;
  std::vector<int> m_sweep;

  std::string out_path = "-";
  Format format = Format::csv;
};

namespace detail {

/// Raw option values captured by CLI11 before resolution.
struct CliOptions {
  std::string cell_spec;
  std::vector<std::string> fn_specs;
  double tol = 1e-6;
  int nsp_low = 5;
  int nsp_high = 8;
  int max_depth = 30;
  std::string comparator = "ge";
  std::string out_path = "-";
  std::string format = "csv";
  std::string m_list;
  std::string cusp_list;
  std::string fit = "even";
  std::string tols_list;
  std::string ms_list;
  std::string interface_name;
  double element_size = 1.0;
  std::string command;
};

/// Integer list accepting `a,b,c` or inclusive ranges `from:to:step`.
inline std::vector<int> parse_int_list(const std::string& s, const std::string& field) {
  std::vector<int> out;
  const auto range = split(s, ':');
  if (range.size() == 3) {
    const int from = static_cast<int>(parse_number(range[0], field));
    const int to = static_cast<int>(parse_number(range[1], field));
    const int step = static_cast<int>(parse_number(range[2], field));
    if (step <= 0 || to < from) throw config_error(field + ": bad range '" + s + "'");
    for (int v = from; v <= to; v += step) out.push_back(v);
    return out;
  }
  for (double v : parse_number_list(s, field)) out.push_back(static_cast<int>(v));
  if (out.empty()) throw config_error(field + ": empty list");
  return out;
}

inline void add_common_options(CLI::App* cmd, CliOptions& opt, bool needs_fn, bool needs_tol) {
  cmd->add_option("--cell", opt.cell_spec, "Cell: name (unitcube3, sym3, unitsquare), "
                  "inline rows 'b;v1;..;vn', or @file")
      ->required();
  if (needs_fn) {
    cmd->add_option("--fn", opt.fn_specs, "Integrand spec name[:params], repeatable")
        ->required();
  }
  auto* tol = cmd->add_option("--tol", opt.tol, "Absolute per-cell error tolerance");
  if (needs_tol) tol->required();
  cmd->add_option("--nsp-low", opt.nsp_low, "Points per direction of the emitted rule");
  cmd->add_option("--nsp-high", opt.nsp_high, "Points per direction of the error reference");
  cmd->add_option("--max-depth", opt.max_depth, "Recursion depth cap");
  cmd->add_option("--comparator", opt.comparator, "Subdivide on error 'ge' or 'gt' tol")
      ->check(CLI::IsMember({"ge", "gt"}));
  cmd->add_option("--out,-o", opt.out_path, "Output path, '-' for stdout");
  cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

inline std::unique_ptr<CLI::App> build_app(CliOptions& opt) {
  auto app = std::make_unique<CLI::App>(
      "adaptive Gauss-Legendre quadrature over n-dimensional parallelepipeds");
  app->name("adquad");
  app->require_subcommand(1);

  auto* rule = app->add_subcommand("rule", "Build an adaptive rule and write points/weights");
  add_common_options(rule, opt, /*needs_fn=*/true, /*needs_tol=*/true);
  rule->callback([&opt] { opt.command = "rule"; });

  auto* integrate = app->add_subcommand("integrate",
                                        "Build an adaptive rule and integrate each integrand");
  add_common_options(integrate, opt, true, true);
  integrate->callback([&opt] { opt.command = "integrate"; });

  auto* converge = app->add_subcommand("converge",
                                       "Tensor-product convergence study for one integrand");
  add_common_options(converge, opt, true, /*needs_tol=*/false);
  converge->add_option("--m", opt.m_list, "Points per direction: list 'a,b,c' or range 'a:b:s'")
      ->required();
  converge->add_option("--cusp", opt.cusp_list, "Cusp location (defaults to the origin)");
  converge->add_option("--fit", opt.fit, "Fit the rate over 'even' m only, or 'all'")
      ->check(CLI::IsMember({"even", "all"}));
  converge->callback([&opt] { opt.command = "converge"; });

  auto* compare = app->add_subcommand("compare",
                                      "Tensor vs adaptive cost for a Heaviside family");
  compare->add_option("--cell", opt.cell_spec, "Cell (defaults to the unit square)");
  compare->add_option("--interface", opt.interface_name, "straight, kinked, or quadratic")
      ->required();
  compare->add_option("--hsize", opt.element_size, "Element size h scaling the eps family");
  compare->add_option("--tols", opt.tols_list, "Adaptive tolerance sweep 'a,b,c'")->required();
  compare->add_option("--ms", opt.ms_list, "Tensor m sweep: list or range 'a:b:s'")->required();
  compare->add_option("--nsp-low", opt.nsp_low, "Points per direction of the emitted rule");
  compare->add_option("--nsp-high", opt.nsp_high, "Points per direction of the error reference");
  compare->add_option("--max-depth", opt.max_depth, "Recursion depth cap");
  compare->add_option("--comparator", opt.comparator, "Subdivide on error 'ge' or 'gt' tol")
      ->check(CLI::IsMember({"ge", "gt"}));
  compare->add_option("--out,-o", opt.out_path, "Output path, '-' for stdout");
  compare->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  compare->callback([&opt] { opt.command = "compare"; });

  return app;
}

inline RunConfig resolve_options(const CliOptions& opt) {
  RunConfig cfg;
  if (opt.command == "rule") cfg.command = RunConfig::Command::rule;
  else if (opt.command == "integrate") cfg.command = RunConfig::Command::integrate;
  else if (opt.command == "converge") cfg.command = RunConfig::Command::converge;
  else if (opt.command == "compare") cfg.command = RunConfig::Command::compare;
  else throw config_error("command: missing subcommand");

  cfg.adaptive.nsp_low = opt.nsp_low;
  cfg.adaptive.nsp_high = opt.nsp_high;
  cfg.adaptive.tol = opt.tol;
  cfg.adaptive.max_depth = opt.max_depth;
  cfg.adaptive.comparator =
      opt.comparator == "gt" ? Comparator::subdivide_on_gt : Comparator::subdivide_on_ge;
  if (!(cfg.adaptive.tol > 0.0)) throw config_error("tol: must be > 0");
  try {
    validate_config(cfg.adaptive);
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("adaptive: ") + e.what());
  }

  cfg.out_path = opt.out_path;
  cfg.format = opt.format == "json" ? RunConfig::Format::json : RunConfig::Format::csv;

  if (cfg.command == RunConfig::Command::compare) {
    cfg.cell = opt.cell_spec.empty() ? unit_cube(2) : parse_cell(opt.cell_spec);
    if (cfg.cell.dim != 2) throw config_error("cell: compare requires a 2-dimensional cell");
    cfg.integrands = heaviside_family(parse_interface(opt.interface_name), opt.element_size);
    for (double v : parse_number_list(opt.tols_list, "tols")) {
      if (!(v > 0.0)) throw config_error("tols: tolerances must be > 0");
      cfg.tol_sweep.push_back(v);
    }
    cfg.m_sweep = parse_int_list(opt.ms_list, "ms");
    return cfg;
  }

  cfg.cell = parse_cell(opt.cell_spec);
  cfg.integrands = parse_integrands(opt.fn_specs, cfg.cell.dim);
  if (cfg.integrands.empty()) throw config_error("fn: at least one integrand is required");

  if (cfg.command == RunConfig::Command::converge) {
    if (cfg.integrands.size() != 1) {
      throw config_error("fn: converge takes exactly one integrand");
    }
    cfg.m_values = parse_int_list(opt.m_list, "m");
    for (std::size_t i = 1; i < cfg.m_values.size(); ++i) {
      if (cfg.m_values[i] <= cfg.m_values[i - 1]) {
        throw config_error("m: values must be strictly increasing");
      }
    }
    cfg.cusp = opt.cusp_list.empty()
                   ? std::vector<double>(static_cast<std::size_t>(cfg.cell.dim), 0.0)
                   : parse_number_list(opt.cusp_list, "cusp");
    if (cfg.cusp.size() != static_cast<std::size_t>(cfg.cell.dim)) {
      throw config_error("cusp: needs " + std::to_string(cfg.cell.dim) + " coordinates");
    }
    cfg.fit_even_only = opt.fit != "all";
  }
  return cfg;
}

}  // namespace detail

/// Parses command-line tokens (without argv[0]) into a validated RunConfig.
/// Malformed input raises config_error with the offending field in the
/// message.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  detail::CliOptions opt;
  auto app = detail::build_app(opt);
  std::vector<const char*> argv;
  argv.push_back("adquad");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    throw config_error(e.what());
  }
  return detail::resolve_options(opt);
}

namespace detail {

struct OutputTarget {
  std::ostream* os;
  std::ofstream file;
};

inline void open_output(OutputTarget& target, const std::string& path) {
  const std::string resolved = resolve_out_path(path);
  if (resolved == "-") {
    target.os = &std::cout;
    return;
  }
  target.file.open(resolved, std::ios::binary);
  if (!target.file) throw std::ios_base::failure("cannot open output file '" + resolved + "'");
  target.os = &target.file;
}

inline int execute(const RunConfig& cfg) {
  OutputTarget out;
  open_output(out, cfg.out_path);

  switch (cfg.command) {
    case RunConfig::Command::rule: {
      const AdaptiveResult result = build_adaptive_rule(cfg.cell, cfg.integrands, cfg.adaptive);
      if (cfg.format == RunConfig::Format::csv) {
        write_rule_csv(*out.os, result.rule);
      } else {
        write_rule_json(*out.os, to_rule_file(result, cfg.adaptive));
      }
      std::ostream& log = out.os == &std::cout ? std::cerr : std::cout;
      log << "points=" << result.rule.count() << " leaves=" << result.leaf_count
          << " max_depth=" << result.max_depth_reached << " active_leaves=";
      for (std::size_t i = 0; i < result.per_integrand_active_leaves.size(); ++i) {
        log << (i ? "," : "") << result.per_integrand_active_leaves[i];
      }
      log << "\n";
      break;
    }
    case RunConfig::Command::integrate: {
      const AdaptiveResult result = build_adaptive_rule(cfg.cell, cfg.integrands, cfg.adaptive);
      if (cfg.format == RunConfig::Format::csv) {
        *out.os << "label,integral\n";
        for (const auto& f : cfg.integrands) {
          *out.os << f.label() << "," << format_double(integrate_with_rule(result.rule, f))
                  << "\n";
        }
      } else {
        nlohmann::json j;
        j["points"] = result.rule.count();
        auto& list = j["integrals"] = nlohmann::json::array();
        for (const auto& f : cfg.integrands) {
          list.push_back({{"label", f.label()},
                          {"value", integrate_with_rule(result.rule, f)}});
        }
        *out.os << j.dump(2) << "\n";
      }
      break;
    }
    case RunConfig::Command::converge: {
      const auto records = tensor_convergence_study(cfg.integrands[0], cfg.cell, cfg.m_values,
                                                    cfg.cusp);
      if (cfg.format == RunConfig::Format::csv) {
        write_convergence_csv(*out.os, records);
      } else {
        write_convergence_json(*out.os, records);
      }
      std::vector<ConvergenceRecord> fitted;
      for (const auto& r : records) {
        if (!cfg.fit_even_only || r.points_per_direction % 2 == 0) fitted.push_back(r);
      }
      std::ostream& log = out.os == &std::cout ? std::cerr : std::cout;
      try {
        log << "slope=" << fit_rate(fitted, RateAxis::min_dist) << "\n";
      } catch (const insufficient_data_error& e) {
        log << "slope=nan (" << e.what() << ")\n";
      }
      break;
    }
    case RunConfig::Command::compare: {
      const auto records = compare_strategies(cfg.integrands, cfg.cell, cfg.tol_sweep,
                                              cfg.m_sweep, cfg.adaptive);
      if (cfg.format == RunConfig::Format::csv) {
        write_comparison_csv(*out.os, records);
      } else {
        write_comparison_json(*out.os, records);
      }
      break;
    }
  }
  out.os->flush();
  if (out.file.is_open() && !out.file) {
    throw std::ios_base::failure("write failed for '" + resolve_out_path(cfg.out_path) + "'");
  }
  return 0;
}

inline std::string single_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace detail

/// Full CLI driver. Exit codes: 0 success, 2 configuration error,
/// 3 numerical error (depth exceeded, non-finite integrand), 1 I/O or
/// internal failure. Every error path prints a single-line diagnostic with
/// a machine-parsable `error: <category>:` prefix.
inline int run_cli(int argc, const char* const* argv) {
  detail::CliOptions opt;
  auto app = detail::build_app(opt);
  try {
    app->parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app->exit(e);  // --help
    }
    std::cerr << "error: config: " << detail::single_line(e.what()) << "\n";
    return 2;
  }
  try {
    const RunConfig cfg = detail::resolve_options(opt);
    return detail::execute(cfg);
  } catch (const config_error& e) {
    std::cerr << "error: config: " << detail::single_line(e.what()) << "\n";
    return 2;
  } catch (const depth_exceeded_error& e) {
    std::cerr << "error: numeric: " << detail::single_line(e.what()) << "\n";
    return 3;
  } catch (const nonfinite_integrand_error& e) {
    std::cerr << "error: numeric: " << detail::single_line(e.what()) << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: io: " << detail::single_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << detail::single_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace adquad
