#pragma once

// Functional depths: kernel depth (KD), modified regularized halfspace depth
// (RHD) with random projections, integrated (ITD) and infimal (IFD) depths.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdstat/funcspace.hpp"
#include "fdstat/rng.hpp"

namespace fdstat {

enum class DepthKind { KD, RHD, ITD, IFD };
enum class KernelKind { gaussian, laplace };

std::string to_string(DepthKind kind);
std::string to_string(KernelKind kind);
DepthKind parse_depth_kind(const std::string& name);
KernelKind parse_kernel_kind(const std::string& name);

struct DepthSpec {
  DepthKind kind = DepthKind::KD;
  /// Quantile level for the KD bandwidth or the RHD dispersion threshold.
  double quantile_u = 0.01;
  KernelKind kernel = KernelKind::gaussian;
  int projections = 500;
  /// Overrides the quantile-based KD bandwidth when set.
  std::optional<double> bandwidth;
  /// Order tied depths by their tie-break keys when computing p-values
  /// (RHD: projection outlyingness; IFD: one minus the integrated depth).
  bool tiebreak = true;

  void validate() const;
};

struct DepthValue {
  double value = 0.0;
  /// Secondary ordering for tied depths; larger means more outlying.
  std::optional<double> tiebreak_key;
};

/// Kernel profile K(t); K(0) = 1 for both kernels.
double kernel_value(KernelKind kernel, double t);

/// The order statistic at 1-based index ceil(u*m) of m values.
double quantile_order_statistic(std::vector<double> values, double u);

/// u-quantile of the ordered-pair distances {||X_i - X_i'|| : i != i'}.
/// Falls back to the smallest positive distance when the quantile is zero,
/// and to 1 when every distance is zero.
double kd_bandwidth(const FunctionalSample& ensemble, double u);

DepthValue kd_depth(const Curve& x, const FunctionalSample& ensemble, const DepthSpec& spec);

/// Gaussian-limit kernel depth E exp(-||x - X||^2 / 2) for X ~ N(0, Sigma)
/// with eigenpairs (sigma_j, psi_j). Coordinates of x outside the span of the
/// eigenfunctions contribute with sigma = 0.
double kd_gaussian_oracle(const Curve& x, std::span<const double> eigenvalues,
                          std::span<const Curve> eigenfunctions);

/// Random direction pool for the projection approximation of RHD.
struct RhdDirections {
  MatrixXd directions;    ///< p x M, unit norm in the grid inner product
  VectorXd dispersion;    ///< ||Gamma^{1/2} v_m|| for each direction
  double threshold = 0;   ///< lambda: u-quantile of the dispersions
  std::vector<Index> retained;
};

RhdDirections rhd_directions(const FunctionalSample& ensemble, int M, double u, RngStream& rng);

DepthValue rhd_depth(const Curve& x, const FunctionalSample& ensemble, const RhdDirections& pool);
DepthValue rhd_depth(const Curve& x, const FunctionalSample& ensemble, const DepthSpec& spec,
                     RngStream& rng);

double univariate_halfspace(double x, std::span<const double> sample);

DepthValue itd_depth(const Curve& x, const FunctionalSample& ensemble);
DepthValue ifd_depth(const Curve& x, const FunctionalSample& ensemble);

/// Depth with respect to a fixed ensemble, precomputed for repeated queries.
class DepthFunction {
 public:
  virtual ~DepthFunction() = default;

  virtual DepthValue evaluate(const Eigen::Ref<const VectorXd>& x) const = 0;

  /// Depth of ensemble member i with respect to the whole ensemble.
  virtual DepthValue evaluate_member(Index i) const { return evaluate(ensemble().column(i)); }

  virtual const FunctionalSample& ensemble() const = 0;
};

/// Builds the depth of `spec` over `ensemble`. Only RHD draws from `rng`
/// (its direction pool, drawn once and reused for every query).
std::unique_ptr<DepthFunction> make_depth_function(const DepthSpec& spec,
                                                   const FunctionalSample& ensemble,
                                                   RngStream rng);

}  // namespace fdstat
