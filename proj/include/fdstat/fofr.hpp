#pragma once

// Mean-response inference in function-on-function regression: the FPCR slope
// estimator, the scaled statistic at a new regressor, its residual bootstrap,
// and truncation selection by cross-validation and variance explained.

#include <span>
#include <string>
#include <vector>

#include "fdstat/inference.hpp"

namespace fdstat {

struct FoFRData {
  FoFRData(FunctionalSample X, FunctionalSample Y, Curve x0);

  FunctionalSample X;
  FunctionalSample Y;
  Curve x0;

  Index n() const noexcept { return X.size(); }
};

/// Column mean computed as first column + mean of offsets from it, so that a
/// sample of identical curves has that curve as its exact mean.
VectorXd stable_mean(const MatrixXd& columns);

/// Truncated principal component regression fit B_J = Delta Gamma_J^{-1}.
struct FPCRFit {
  Index J = 1;
  Index J_res = 1;
  Index J_cen = 1;
  CovOp cov;           ///< eigenpairs of the regressor covariance
  Index rank = 0;      ///< eigenvalues above 1e-12 (relative to max(1, largest))
  MatrixXd scores;     ///< n x K, <X_i - xbar, phi_j>
  MatrixXd delta;      ///< p x K, Delta phi_j = n^-1 sum_i scores(i,j) (Y_i - ybar)
  VectorXd xbar;
  VectorXd ybar;

  Index n() const noexcept { return scores.rows(); }
  Index levels() const noexcept { return scores.cols(); }

  /// <x - xbar, phi_j> for the stored levels.
  VectorXd coordinates(const Eigen::Ref<const VectorXd>& x) const;
  /// B_level (x - xbar).
  VectorXd predict(const Eigen::Ref<const VectorXd>& x, Index level) const;
  VectorXd predict(const Eigen::Ref<const VectorXd>& x) const { return predict(x, J); }
};

FPCRFit fpcr_fit(const FunctionalSample& X, const FunctionalSample& Y, Index J);
FPCRFit fpcr_fit(const FunctionalSample& X, const FunctionalSample& Y, Index J, Index J_res,
                 Index J_cen);

/// sum_{j<=J} <x - xbar, phi_j>^2 / gamma_j; throws degenerate_scaling below 1e-12.
double tau_scale(const FPCRFit& fit, const Curve& x);

/// sqrt(n / tau_J(x0)) B_J (x0 - xbar).
Curve fofr_statistic(const FoFRData& d, const FPCRFit& fit);

/// Residuals Y_i - ybar - B_{J_res}(X_i - xbar), one column per observation.
MatrixXd fofr_residuals(const FoFRData& d, const FPCRFit& fit);

/// Residual bootstrap with regressors held fixed: replicate b redraws the
/// residuals (stream rng.child(bootstrap, b)), rebuilds responses around
/// B_{J_cen}, refits the cross-covariance with the original Gamma_J^{-1} and
/// emits sqrt(n / tau) (B*_J - B_{J_cen})(x0 - xbar).
BootstrapEnsemble fofr_bootstrap(const FoFRData& d, const FPCRFit& fit, Index B, RngStream rng,
                                 int workers = 1);

struct CvSelection {
  Index selected = 0;
  std::vector<Index> candidates;  ///< evaluated candidates
  std::vector<double> errors;     ///< average prediction error per evaluated candidate
};

/// G-fold cross-validation of the residual truncation. Folds are contiguous
/// blocks of a seeded shuffle; candidates above a training rank are skipped.
CvSelection select_J_res_cv(const FunctionalSample& X, const FunctionalSample& Y,
                            std::span<const Index> candidates, Index G, RngStream rng);

/// Contiguous fold blocks over a seeded shuffle of 0..n-1.
std::vector<std::vector<Index>> cv_folds(Index n, Index G, RngStream rng);

struct FveSelection {
  Index J = 0;
  bool warning = false;  ///< threshold never reached; full positive rank returned
};

/// Smallest J >= J_cen whose fraction of variance explained reaches rho.
FveSelection select_J_fve(std::span<const double> gamma_hat, Index J_cen, double rho);

enum class FoFRMethod { RHD, KD, L2, SUP };

std::string to_string(FoFRMethod method);
std::vector<FoFRMethod> parse_fofr_methods(const std::string& comma_list);

struct FoFROptions {
  Index B = 1000;
  double kd_u = 0.01;
  double rhd_u = 0.001;
  int projections = 500;
  KernelKind kernel = KernelKind::gaussian;
  bool rhd_tiebreak = true;
  bool smoothed = false;
  Calibration calibration = Calibration::pooled;
  Index max_candidate = 20;
  Index folds = 5;
  double rho = 0.85;
  int workers = 1;
};

struct FoFRResult {
  Index J = 0;
  Index J_res = 0;
  Index J_cen = 0;
  bool fve_warning = false;
  CvSelection cv;
  std::vector<TestReport> reports;
};

/// Full pipeline: J_res by cross-validation, J_cen = J_res, J by variance
/// explained, then every method against one shared bootstrap ensemble.
FoFRResult fofr_tests(const FoFRData& d, std::span<const FoFRMethod> methods,
                      const FoFROptions& options, RngStream rng);

TestReport fofr_test(const FoFRData& d, FoFRMethod method, const FoFROptions& options,
                     RngStream rng);

}  // namespace fdstat
