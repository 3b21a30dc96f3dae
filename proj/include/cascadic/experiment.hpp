#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cascadic/cascade.hpp"

namespace cascadic {

/// Named experiment: a cascade configuration with table-caption defaults.
struct ExperimentPreset {
  std::string name;
  CascadeConfig config;
  /// Uzawa relaxation used when --solver uzawa is given without --alpha.
  double default_alpha = 1.0;
};

/// square-p2p0, square-th, lshape-uniform, lshape-graded.
const std::vector<ExperimentPreset>& experiment_presets();
const ExperimentPreset& find_preset(std::string_view name);

enum class TableFormat { Text, Csv };

struct CliOptions {
  CascadeConfig config;
  std::string preset;
  int print_from = 4;
  TableFormat format = TableFormat::Text;
  std::optional<std::string> output;
  std::optional<std::string> dump_mesh;
};

/// Resolves flags over preset defaults. Throws UsageError on unknown flags
/// or invalid values. Returns nullopt when --help was requested (help text
/// is written to `out`).
std::optional<CliOptions> parse_args(const std::vector<std::string>& args, std::ostream& out);

/// CSV header: level,h,N_dof,err_u,rate_u,err_p,rate_p,iters,final_residual
void emit_table(std::ostream& out, const std::vector<LevelReport>& reports, TableFormat format);

/// Parses emitted CSV back into reports (rates, errors and residuals exact).
std::vector<LevelReport> parse_csv_table(std::istream& in);

/// Full CLI. Exit status: 0 on success, 3 when some level hit the iteration
/// cap (the table is still written), 2 on usage errors, 1 on other failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascadic
