#include <algorithm>

#include "fdstat/cli.hpp"

namespace fdstat::cli {

using nlohmann::ordered_json;

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["method"] = method;
  j["B"] = B;
  j["seed"] = seed;
  if (u) j["u"] = *u;
  j["kernel"] = kernel;
  j["projections"] = projections;
  j["calibration"] = calibration;
  j["smoothed"] = smoothed;
  j["tiebreak"] = tiebreak;
  if (command == "power") {
    j["reps"] = reps;
    j["alpha"] = alpha;
    j["grid"] = grid;
  }
  if (command == "gen") j["grid"] = grid;
  if (command == "fofr" || (command == "power" && scenario == "fofr")) {
    j["max_candidate"] = max_candidate;
    j["folds"] = folds;
    j["rho"] = rho;
  }
  if (command == "power" || command == "gen") {
    j["scenario"] = scenario;
    j["n"] = n;
    j["scores"] = scores;
    j["J_true"] = J_true;
    if (scenario == "fofr") {
      j["aX"] = aX;
      j["aE"] = aE;
      j["b"] = b;
      j["J0"] = J0;
    } else {
      j["shape"] = shape;
      j["a1"] = a1;
      j["a2"] = a2;
      j["basis1"] = basis1;
      j["basis2"] = basis2;
    }
    if (command == "gen") j["c"] = c;
    else j["scales"] = scales;
  }
  return j;
}

TwoSampleOptions two_sample_options(const RunConfig& config) {
  TwoSampleOptions o;
  o.B = config.B;
  if (config.u) o.kd_u = o.rhd_u = *config.u;
  o.projections = config.projections;
  o.kernel = parse_kernel_kind(config.kernel);
  o.rhd_tiebreak = config.tiebreak;
  o.smoothed = config.smoothed;
  o.calibration = parse_calibration(config.calibration);
  o.workers = config.workers;
  return o;
}

FoFROptions fofr_options(const RunConfig& config) {
  FoFROptions o;
  o.B = config.B;
  if (config.u) o.kd_u = o.rhd_u = *config.u;
  o.projections = config.projections;
  o.kernel = parse_kernel_kind(config.kernel);
  o.rhd_tiebreak = config.tiebreak;
  o.smoothed = config.smoothed;
  o.calibration = parse_calibration(config.calibration);
  o.max_candidate = config.max_candidate;
  o.folds = config.folds;
  o.rho = config.rho;
  o.workers = config.workers;
  return o;
}

TwoSampleScenario two_sample_scenario(const RunConfig& config) {
  TwoSampleScenario s;
  s.shape = parse_shape_kind(config.shape);
  s.c = config.c;
  s.n = config.n;
  s.scores = parse_score_kind(config.scores);
  s.a1 = config.a1;
  s.a2 = config.a2;
  s.basis1 = parse_basis_kind(config.basis1);
  s.basis2 = parse_basis_kind(config.basis2);
  s.J_true = config.J_true;
  return s;
}

FoFRScenario fofr_scenario(const RunConfig& config) {
  FoFRScenario s;
  s.aX = config.aX;
  s.aE = config.aE;
  s.b = config.b;
  s.c = config.c;
  s.n = config.n;
  s.scores = parse_score_kind(config.scores);
  s.J_true = config.J_true;
  s.J0 = config.J0;
  return s;
}

TwoSampleData split_groups(const FunctionalSample& sample) {
  const auto& labels = sample.labels();
  if (labels.empty()) throw Error(Errc::usage, "two-sample data needs a 'group' column");
  std::vector<std::string> names;
  for (const auto& l : labels)
    if (std::find(names.begin(), names.end(), l) == names.end()) names.push_back(l);
  if (names.size() != 2)
    throw Error(Errc::usage, "two-sample data needs exactly 2 groups, found " +
                                 std::to_string(names.size()));
  std::vector<Index> first, second;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == names[0] ? first : second).push_back(static_cast<Index>(i));
  auto pick = [&](const std::vector<Index>& idx) {
    MatrixXd v(sample.values().rows(), static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) v.col(static_cast<Index>(j)) = sample.column(idx[j]);
    return FunctionalSample(sample.grid(), std::move(v));
  };
  return TwoSampleData(pick(first), pick(second));
}

ordered_json depth_spec_json(const DepthSpec& spec) {
  ordered_json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind == DepthKind::KD || spec.kind == DepthKind::RHD) j["u"] = spec.quantile_u;
  if (spec.kind == DepthKind::KD) {
    j["kernel"] = to_string(spec.kernel);
    if (spec.bandwidth) j["bandwidth"] = *spec.bandwidth;
  }
  if (spec.kind == DepthKind::RHD) j["projections"] = spec.projections;
  if (spec.kind == DepthKind::RHD || spec.kind == DepthKind::IFD) j["tiebreak"] = spec.tiebreak;
  return j;
}

ordered_json report_json(const TestReport& report) {
  ordered_json j;
  j["method"] = report.method;
  if (report.observed_depth) j["observed_depth"] = *report.observed_depth;
  if (report.observed_scalar) j["observed_scalar"] = *report.observed_scalar;
  j["pvalue"] = report.pvalue;
  j["B"] = report.B;
  j["seed"] = report.seed;
  if (report.depth_spec) j["depth_spec"] = depth_spec_json(*report.depth_spec);
  if (report.scalar_kind) j["scalar_kind"] = to_string(*report.scalar_kind);
  if (report.calibration) j["calibration"] = to_string(*report.calibration);
  if (!report.extras.empty()) {
    ordered_json extras = ordered_json::object();
    for (const auto& [k, v] : report.extras) extras[k] = v;
    j["extras"] = extras;
  }
  return j;
}

}  // namespace fdstat::cli
