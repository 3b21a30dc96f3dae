#include "cascadic/experiment.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cascadic/error.hpp"

namespace cascadic {

namespace {

ExperimentPreset make_preset(std::string name, Domain domain, ElementPair pair, RefinementRule rule, double c_lc,
                             double s, Complexity complexity, int levels, double alpha) {
  ExperimentPreset preset;
  preset.name = std::move(name);
  preset.config.domain = domain;
  preset.config.pair = pair;
  preset.config.refinement = rule;
  preset.config.solver = SolverKind::gradient();
  preset.config.levels = levels;
  preset.config.c_lc = c_lc;
  preset.config.s = s;
  preset.config.complexity = complexity;
  preset.default_alpha = alpha;
  return preset;
}

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string optional_field(const std::optional<double>& v, const char* fmt) {
  return v ? format_double(fmt, *v) : std::string{};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// strtod rather than stod: subnormal values must round-trip, not throw.
double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::IoError, "malformed number '" + s + "'");
  return v;
}

long long parse_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(ErrorCode::IoError, "malformed integer '" + s + "'");
  return v;
}

}  // namespace

const std::vector<ExperimentPreset>& experiment_presets() {
  static const std::vector<ExperimentPreset> presets = {
      make_preset("square-p2p0", Domain::UnitSquare, ElementPair::P2P0, RefinementRule::uniform(), 1.0 / 16.0, 1.0,
                  Complexity::MeshSize, 8, 0.8),
      make_preset("square-th", Domain::UnitSquare, ElementPair::TaylorHood, RefinementRule::uniform(), 1.0 / 16.0,
                  2.0, Complexity::MeshSize, 8, 1.0),
      make_preset("lshape-uniform", Domain::LShape, ElementPair::TaylorHood, RefinementRule::uniform(), 1.0 / 8.0,
                  1.0 / 3.0, Complexity::DofCount, 8, 1.0),
      make_preset("lshape-graded", Domain::LShape, ElementPair::TaylorHood,
                  RefinementRule::graded(1.0 / 8.0, Point{0.0, 0.0}), 1.0 / 8.0, 1.0, Complexity::DofCount, 9, 1.0),
  };
  return presets;
}

const ExperimentPreset& find_preset(std::string_view name) {
  for (const auto& preset : experiment_presets()) {
    if (preset.name == name) return preset;
  }
  throw Error(ErrorCode::UsageError, "unknown preset '" + std::string(name) + "'");
}

std::optional<CliOptions> parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Cascadic multilevel Uzawa solvers for the Stokes equations"};
  std::string preset_name = "square-th";
  std::string solver_name;
  std::optional<double> alpha, c_lc, s, kappa;
  std::string complexity;
  std::optional<int> levels, start_level, max_iters;
  int print_from = 4;
  std::string format = "text";
  std::optional<std::string> output, dump_mesh;

  std::vector<std::string> preset_names;
  for (const auto& p : experiment_presets()) preset_names.push_back(p.name);

  app.add_option("--preset", preset_name, "Experiment preset")->check(CLI::IsMember(preset_names));
  app.add_option("--solver", solver_name, "Level solver")->check(CLI::IsMember({"uzawa", "ug", "ucg"}));
  app.add_option("--alpha", alpha, "Uzawa relaxation parameter");
  app.add_option("--clc", c_lc, "Level-change constant C_lc");
  app.add_option("--s", s, "Level-change exponent s");
  app.add_option("--complexity", complexity, "Threshold measure: h (mesh size) or n (dof count)")
      ->check(CLI::IsMember({"h", "n"}));
  app.add_option("--kappa", kappa, "Graded refinement ratio toward (0,0)");
  app.add_option("--levels", levels, "Finest level k_max");
  app.add_option("--start-level", start_level, "First iterated level");
  app.add_option("--max-iters", max_iters, "Iteration cap per level");
  app.add_option("--print-from", print_from, "First printed level");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--output", output, "Write the table to this file");
  app.add_option("--dump-mesh", dump_mesh, "Write the finest mesh to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::UsageError, e.what());
  }

  const ExperimentPreset& preset = find_preset(preset_name);
  CliOptions options;
  options.preset = preset.name;
  options.config = preset.config;
  CascadeConfig& cfg = options.config;
  if (!solver_name.empty()) {
    if (solver_name == "uzawa") {
      cfg.solver = SolverKind::uzawa(alpha.value_or(preset.default_alpha));
    } else if (solver_name == "ug") {
      cfg.solver = SolverKind::gradient();
    } else {
      cfg.solver = SolverKind::conjugate_gradient();
    }
  }
  if (alpha && cfg.solver.method != SolverKind::Method::Uzawa) {
    throw Error(ErrorCode::UsageError, "--alpha applies to --solver uzawa only");
  }
  if (c_lc) cfg.c_lc = *c_lc;
  if (s) cfg.s = *s;
  if (!complexity.empty()) cfg.complexity = complexity == "h" ? Complexity::MeshSize : Complexity::DofCount;
  if (kappa) {
    if (!(*kappa > 0.0 && *kappa <= 1.0)) throw Error(ErrorCode::UsageError, "--kappa must lie in (0, 1]");
    cfg.refinement = RefinementRule::graded(*kappa, Point{0.0, 0.0});
  }
  if (levels) cfg.levels = *levels;
  if (start_level) cfg.start_level = *start_level;
  if (max_iters) cfg.max_iters_per_level = *max_iters;
  options.print_from = print_from;
  options.format = format == "csv" ? TableFormat::Csv : TableFormat::Text;
  options.output = output;
  options.dump_mesh = dump_mesh;
  try {
    validate(cfg);
  } catch (const Error& e) {
    throw Error(ErrorCode::UsageError, e.what());
  }
  return options;
}

void emit_table(std::ostream& out, const std::vector<LevelReport>& reports, TableFormat format) {
  if (format == TableFormat::Csv) {
    out << "level,h,N_dof,err_u,rate_u,err_p,rate_p,iters,final_residual\n";
    for (const auto& r : reports) {
      out << r.k << ',' << format_double("%.17g", r.h) << ',' << r.n_dof << ',' << format_double("%.17g", r.err_u)
          << ',' << optional_field(r.rate_u, "%.17g") << ',' << format_double("%.17g", r.err_p) << ','
          << optional_field(r.rate_p, "%.17g") << ',' << r.iterations << ','
          << format_double("%.17g", r.final_residual) << '\n';
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof(line), "%5s %12s %10s %14s %6s %14s %6s %6s %12s\n", "k", "h", "N_dof", "|u-u_j|",
                  "rate", "||p-p_j||", "rate", "iters", "||q||");
    out << line;
    for (const auto& r : reports) {
      std::snprintf(line, sizeof(line), "%5d %12.6g %10zu %14.7g %6s %14.7g %6s %6d %12.4e%s\n", r.k, r.h, r.n_dof,
                    r.err_u, optional_field(r.rate_u, "%.2f").c_str(), r.err_p,
                    optional_field(r.rate_p, "%.2f").c_str(), r.iterations, r.final_residual,
                    r.cap_exceeded ? "  (cap)" : "");
      out << line;
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed to write table");
}

std::vector<LevelReport> parse_csv_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "level,h,N_dof,err_u,rate_u,err_p,rate_p,iters,final_residual") {
    throw Error(ErrorCode::IoError, "missing CSV header");
  }
  std::vector<LevelReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorCode::IoError, "CSV row must have 9 fields");
    LevelReport r;
    r.k = static_cast<int>(parse_integer(f[0]));
    r.h = parse_double(f[1]);
    r.n_dof = static_cast<std::size_t>(parse_integer(f[2]));
    r.err_u = parse_double(f[3]);
    if (!f[4].empty()) r.rate_u = parse_double(f[4]);
    r.err_p = parse_double(f[5]);
    if (!f[6].empty()) r.rate_p = parse_double(f[6]);
    r.iterations = static_cast<int>(parse_integer(f[7]));
    r.final_residual = parse_double(f[8]);
    reports.push_back(r);
  }
  return reports;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<CliOptions> options;
  try {
    options = parse_args(args, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
  if (!options) return 0;

  try {
    const CascadeConfig& cfg = options->config;
    Hierarchy hierarchy(cfg.domain, cfg.pair, cfg.refinement, builtin_solution(cfg.domain));
    std::vector<LevelReport> reports = run_cascade(cfg, hierarchy);
    bool cap_hit = false;
    for (const auto& r : reports) cap_hit = cap_hit || r.cap_exceeded;

    std::vector<LevelReport> printed;
    for (const auto& r : reports) {
      if (r.k >= options->print_from) printed.push_back(r);
    }
    if (!printed.empty()) {
      printed.front().rate_u.reset();
      printed.front().rate_p.reset();
    }

    if (options->output) {
      std::ofstream file(*options->output);
      if (!file) throw Error(ErrorCode::IoError, "cannot open " + *options->output);
      emit_table(file, printed, options->format);
    } else {
      emit_table(out, printed, options->format);
    }
    if (options->dump_mesh) {
      std::ofstream file(*options->dump_mesh);
      if (!file) throw Error(ErrorCode::IoError, "cannot open " + *options->dump_mesh);
      write_mesh(file, hierarchy.mesh(cfg.levels));
    }
    return cap_hit ? 3 : 0;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
}

}  // namespace cascadic
