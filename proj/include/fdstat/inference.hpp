#pragma once

// Depth p-values from bootstrap ensembles of statistic curves, and
// bootstrap-calibrated p-values for scalar summaries.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdstat/depth.hpp"

namespace fdstat {

struct BootstrapEnsemble {
  FunctionalSample statistics;
  std::string seed_lineage;

  Index B() const noexcept { return statistics.size(); }
};

enum class ScalarKind { L2, SUP, FINT, FMAX };

std::string to_string(ScalarKind kind);

/// Reference set for depth p-values. `pooled` ranks the observed statistic
/// among the B + 1 curves {observed, bootstrap statistics}, each depth taken
/// with respect to all of them. `excluded` takes the observed depth against
/// the bootstrap statistics alone while each bootstrap depth still counts
/// itself, which inflates the size of discrete depths (RHD, IFD).
enum class Calibration { pooled, excluded };
std::string to_string(Calibration c);
Calibration parse_calibration(const std::string& name);

struct TestReport {
  std::string method;
  std::optional<double> observed_depth;
  std::optional<double> observed_scalar;
  double pvalue = 1.0;
  Index B = 0;
  std::optional<DepthSpec> depth_spec;
  std::optional<ScalarKind> scalar_kind;
  std::optional<Calibration> calibration;
  std::uint64_t seed = 0;
  /// Method-specific metadata (e.g. truncation levels, KD bandwidth).
  std::map<std::string, double> extras;
};

struct PValueOptions {
  /// (count + 1) / (B + 1) instead of count / B.
  bool smoothed = false;
  Calibration calibration = Calibration::pooled;
  int workers = 1;
};

/// Depth of every bootstrap statistic with respect to the whole ensemble.
std::vector<DepthValue> depth_distribution(const BootstrapEnsemble& ens, const DepthSpec& spec,
                                           RngStream rng, int workers = 1);

/// Fraction of bootstrap depths at or below the observed depth. When
/// `tiebreak` is set and both sides carry outlyingness keys, equal depths
/// count only if the bootstrap statistic is at least as outlying.
double depth_rank_pvalue(const DepthValue& observed, std::span<const DepthValue> boot,
                         bool tiebreak, bool smoothed = false);

/// Depth of `observed` and its bootstrap p-value under `options.calibration`.
TestReport depth_pvalue(const Curve& observed, const BootstrapEnsemble& ens, const DepthSpec& spec,
                        RngStream rng, const PValueOptions& options = {});

/// Fraction of bootstrap values at or above the observed value.
TestReport scalar_pvalue(double observed, std::span<const double> bootstrap_values,
                         bool smoothed = false);

/// L2 norm or sup norm of a curve.
double scalar_stat(const Curve& x, ScalarKind kind);

}  // namespace fdstat
