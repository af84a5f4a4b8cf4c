#pragma once

// Command-line plumbing: CSV curve files, JSON reports, SVG plots and the
// command implementations behind the `fdstat` executable.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdstat/power.hpp"

namespace fdstat::cli {

inline constexpr int kReportSchemaVersion = 1;

/// Curves in CSV form. The header holds the grid points; each further row is
/// one curve. A leading `group` header cell marks a label column.
FunctionalSample read_csv(std::istream& in, const std::string& source = "<stream>");
FunctionalSample ingest_csv(const std::string& path);
void write_csv(std::ostream& out, const FunctionalSample& sample);
void emit_csv(const std::string& path, const FunctionalSample& sample);

/// 17 significant digits, which always read back to the same double.
std::string format_double(double v);

struct RunConfig {
  std::string command;
  std::string method;  ///< comma list; empty means the command's default set
  Index B = 1000;
  Index reps = 1000;
  std::uint64_t seed = 1;
  std::optional<double> u;  ///< overrides the per-depth default quantile level
  std::string kernel = "gaussian";
  int projections = 500;
  Index grid = 50;
  std::string out;
  std::string svg;
  int workers = 1;
  std::string calibration = "pooled";
  bool smoothed = false;
  bool tiebreak = true;
  double alpha = 0.05;

  // Data files.
  std::string data;   ///< two-sample data with a group column; depth ensemble
  std::string query;  ///< depth query curves
  std::string x;
  std::string y;
  std::string x0;

  // FoFR tuning.
  Index max_candidate = 20;
  Index folds = 5;
  double rho = 0.85;

  // Scenario knobs for `gen` and `power`.
  std::string scenario = "two-sample";
  std::string shape = "Cub";
  Index n = 50;
  std::string scores = "NN";
  double a1 = 2.5;
  double a2 = 2.5;
  std::string basis1 = "tri";
  std::string basis2 = "tri";
  double aX = 2.5;
  double aE = 2.5;
  double b = 1.5;
  double c = 0.0;
  Index J_true = 20;
  Index J0 = 5;
  std::vector<double> scales = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

  /// Effective configuration echoed into reports. The worker count is left
  /// out: it never changes results.
  nlohmann::ordered_json to_json() const;
};

TwoSampleOptions two_sample_options(const RunConfig& config);
FoFROptions fofr_options(const RunConfig& config);
TwoSampleScenario two_sample_scenario(const RunConfig& config);
FoFRScenario fofr_scenario(const RunConfig& config);

/// Splits labelled curves into the two groups, in order of first appearance.
TwoSampleData split_groups(const FunctionalSample& sample);

nlohmann::ordered_json report_json(const TestReport& report);
nlohmann::ordered_json depth_spec_json(const DepthSpec& spec);

/// Observed statistic (dark) over the bootstrap statistics (grey).
std::string svg_ensemble(const Curve& observed, const FunctionalSample& ensemble,
                         const std::string& title);
/// Rejection rate against c, one polyline per method.
std::string svg_power(const std::vector<PowerRow>& rows, double alpha, const std::string& title);

/// Each command writes its output to config.out (stdout when empty) and
/// returns the process exit status.
int cmd_depth(const RunConfig& config, std::ostream& stdout_stream);
int cmd_two_sample(const RunConfig& config, std::ostream& stdout_stream);
int cmd_fofr(const RunConfig& config, std::ostream& stdout_stream);
int cmd_power(const RunConfig& config, std::ostream& stdout_stream);
int cmd_gen(const RunConfig& config, std::ostream& stdout_stream);

}  // namespace fdstat::cli
