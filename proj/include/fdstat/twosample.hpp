#pragma once

// Two-sample functional mean tests calibrated by the residual bootstrap.

#include <span>
#include <string>
#include <vector>

#include "fdstat/inference.hpp"

namespace fdstat {

struct TwoSampleData {
  TwoSampleData(FunctionalSample group1, FunctionalSample group2);

  FunctionalSample group1;
  FunctionalSample group2;

  Index n1() const noexcept { return group1.size(); }
  Index n2() const noexcept { return group2.size(); }
  /// sqrt(n1 n2 / (n1 + n2))
  double scale() const noexcept;
};

enum class TwoSampleMethod { ITD, IFD, RHD, KD, L2, SUP, FINT, FMAX };

std::string to_string(TwoSampleMethod method);
TwoSampleMethod parse_two_sample_method(const std::string& name);
std::vector<TwoSampleMethod> parse_two_sample_methods(const std::string& comma_list);
bool is_depth_method(TwoSampleMethod method);

/// sqrt(n1 n2 / (n1 + n2)) (mean1 - mean2).
Curve two_sample_statistic(const TwoSampleData& d);

/// One residual resample: indices drawn with replacement within each group.
struct TwoSampleResample {
  std::vector<Index> draw1;
  std::vector<Index> draw2;
};

TwoSampleResample draw_two_sample_resample(const TwoSampleData& d, RngStream rng);

/// Bootstrap statistic of a resample: the scaled difference of the drawn
/// residual means (the pooled mean cancels).
VectorXd two_sample_bootstrap_statistic(const TwoSampleData& d, const TwoSampleResample& r);

/// The resampled groups X*_ki = pooled mean + drawn residual.
TwoSampleData two_sample_bootstrap_groups(const TwoSampleData& d, const TwoSampleResample& r);

/// B bootstrap statistics; replicate b uses stream rng.child(bootstrap, b).
BootstrapEnsemble residual_bootstrap_two(const TwoSampleData& d, Index B, RngStream rng,
                                         int workers = 1);

/// Pointwise one-way ANOVA F ratio for the two groups. Grid points with zero
/// within-group variance give 0 (if the between part is also 0) or +infinity.
/// Throws degenerate_data when every grid point has zero within variance.
VectorXd pointwise_F(const TwoSampleData& d);

/// Quadrature integral (FINT) or maximum (FMAX) of the pointwise F curve.
/// Throws degenerate_data on an infinite F value.
double f_summary(const TwoSampleData& d, ScalarKind kind);

struct TwoSampleOptions {
  Index B = 1000;
  double kd_u = 0.01;
  double rhd_u = 0.1;
  int projections = 500;
  KernelKind kernel = KernelKind::gaussian;
  bool rhd_tiebreak = true;
  bool smoothed = false;
  Calibration calibration = Calibration::pooled;
  int workers = 1;
};

DepthSpec depth_spec_for(TwoSampleMethod method, const TwoSampleOptions& options);

/// Runs every method against one shared bootstrap ensemble.
std::vector<TestReport> two_sample_tests(const TwoSampleData& d,
                                         std::span<const TwoSampleMethod> methods,
                                         const TwoSampleOptions& options, RngStream rng);

TestReport two_sample_test(const TwoSampleData& d, TwoSampleMethod method,
                           const TwoSampleOptions& options, RngStream rng);

}  // namespace fdstat
