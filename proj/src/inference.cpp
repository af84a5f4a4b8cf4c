#include "fdstat/inference.hpp"

#include "fdstat/parallel.hpp"

namespace fdstat {

std::string to_string(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::L2: return "L2";
    case ScalarKind::SUP: return "SUP";
    case ScalarKind::FINT: return "FINT";
    case ScalarKind::FMAX: return "FMAX";
  }
  return "?";
}

std::string to_string(Calibration c) {
  return c == Calibration::pooled ? "pooled" : "excluded";
}

Calibration parse_calibration(const std::string& name) {
  if (name == "pooled") return Calibration::pooled;
  if (name == "excluded") return Calibration::excluded;
  throw Error(Errc::usage, "unknown calibration '" + name + "'");
}

namespace {

void require_ensemble_size(const BootstrapEnsemble& ens, const DepthSpec& spec) {
  if ((spec.kind == DepthKind::KD && !spec.bandwidth) || spec.kind == DepthKind::RHD) {
    if (ens.B() < 2)
      throw Error(Errc::insufficient_sample,
                  to_string(spec.kind) + " needs at least 2 bootstrap statistics");
  }
}

std::vector<DepthValue> member_depths(const DepthFunction& depth, int workers) {
  const auto B = static_cast<std::size_t>(depth.ensemble().size());
  std::vector<DepthValue> out(B);
  parallel_for(B, workers, [&](std::size_t b) { out[b] = depth.evaluate_member(static_cast<Index>(b)); });
  return out;
}

}  // namespace

std::vector<DepthValue> depth_distribution(const BootstrapEnsemble& ens, const DepthSpec& spec,
                                           RngStream rng, int workers) {
  require_ensemble_size(ens, spec);
  const auto depth = make_depth_function(spec, ens.statistics, rng);
  return member_depths(*depth, workers);
}

double depth_rank_pvalue(const DepthValue& observed, std::span<const DepthValue> boot,
                         bool tiebreak, bool smoothed) {
  if (boot.empty()) throw Error(Errc::insufficient_sample, "no bootstrap depths");
  std::size_t count = 0;
  for (const auto& d : boot) {
    if (d.value < observed.value) {
      ++count;
    } else if (d.value == observed.value) {
      if (tiebreak && d.tiebreak_key && observed.tiebreak_key) {
        if (*d.tiebreak_key >= *observed.tiebreak_key) ++count;
      } else {
        ++count;
      }
    }
  }
  const auto B = static_cast<double>(boot.size());
  return smoothed ? (static_cast<double>(count) + 1.0) / (B + 1.0) : static_cast<double>(count) / B;
}

TestReport depth_pvalue(const Curve& observed, const BootstrapEnsemble& ens, const DepthSpec& spec,
                        RngStream rng, const PValueOptions& options) {
  require_compatible(*observed.grid, *ens.statistics.grid());
  require_ensemble_size(ens, spec);
  std::vector<DepthValue> boot;
  DepthValue obs;
  if (options.calibration == Calibration::pooled) {
    const Index B = ens.B();
    MatrixXd pooled(observed.values.size(), B + 1);
    pooled.leftCols(B) = ens.statistics.values();
    pooled.col(B) = observed.values;
    const auto depth =
        make_depth_function(spec, FunctionalSample(ens.statistics.grid(), std::move(pooled)), rng);
    boot = member_depths(*depth, options.workers);
    obs = boot.back();
    boot.pop_back();
  } else {
    const auto depth = make_depth_function(spec, ens.statistics, rng);
    boot = member_depths(*depth, options.workers);
    obs = depth->evaluate(observed.values);
  }

  TestReport report;
  report.method = to_string(spec.kind);
  report.observed_depth = obs.value;
  report.pvalue = depth_rank_pvalue(obs, boot, spec.tiebreak, options.smoothed);
  report.B = ens.B();
  report.depth_spec = spec;
  report.calibration = options.calibration;
  report.seed = rng.key();
  if (obs.tiebreak_key) report.extras["observed_outlyingness"] = *obs.tiebreak_key;
  return report;
}

TestReport scalar_pvalue(double observed, std::span<const double> bootstrap_values, bool smoothed) {
  if (bootstrap_values.empty()) throw Error(Errc::insufficient_sample, "no bootstrap values");
  std::size_t count = 0;
  for (double v : bootstrap_values)
    if (v >= observed) ++count;
  const auto B = static_cast<double>(bootstrap_values.size());
  TestReport report;
  report.observed_scalar = observed;
  report.pvalue =
      smoothed ? (static_cast<double>(count) + 1.0) / (B + 1.0) : static_cast<double>(count) / B;
  report.B = static_cast<Index>(bootstrap_values.size());
  return report;
}

double scalar_stat(const Curve& x, ScalarKind kind) {
  switch (kind) {
    case ScalarKind::L2: return norm(x);
    case ScalarKind::SUP: return x.values.cwiseAbs().maxCoeff();
    default: throw Error(Errc::invalid_argument, "scalar_stat supports L2 and SUP only");
  }
}

}  // namespace fdstat
