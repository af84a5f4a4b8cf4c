#pragma once

// Discretized L2([0,1]): grids with quadrature weights, curves, samples of
// curves, and the covariance/orthonormalization primitives built on them.

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdstat/error.hpp"

namespace fdstat {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Evaluation grid in [0,1] with positive quadrature weights summing to one.
class Grid {
 public:
  Grid(VectorXd points, VectorXd weights);

  const VectorXd& points() const noexcept { return points_; }
  const VectorXd& weights() const noexcept { return weights_; }
  Index size() const noexcept { return points_.size(); }

  /// Same object, or identical points and weights.
  bool compatible_with(const Grid& other) const noexcept;

 private:
  VectorXd points_;
  VectorXd weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// p equispaced points on [0,1] with normalized trapezoid weights.
GridPtr make_grid(Index p);

/// Trapezoid weights (normalized to sum one) on arbitrary strictly increasing
/// points inside [0,1].
GridPtr make_grid(VectorXd points);

void require_compatible(const Grid& a, const Grid& b);

struct Curve {
  Curve(GridPtr grid, VectorXd values);

  GridPtr grid;
  VectorXd values;
};

/// Curves on one grid, stored column-wise (p x n).
class FunctionalSample {
 public:
  FunctionalSample(GridPtr grid, MatrixXd values, std::vector<std::string> labels = {});
  FunctionalSample(GridPtr grid, std::span<const Curve> curves);

  const GridPtr& grid() const noexcept { return grid_; }
  const MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Index size() const noexcept { return values_.cols(); }

  auto column(Index i) const { return values_.col(i); }
  Curve curve(Index i) const { return Curve(grid_, values_.col(i)); }

 private:
  GridPtr grid_;
  MatrixXd values_;
  std::vector<std::string> labels_;
};

template <class A, class B>
double inner_product(const Grid& grid, const Eigen::MatrixBase<A>& f,
                     const Eigen::MatrixBase<B>& g) {
  return (grid.weights().array() * (f.derived().array() * g.derived().array())).sum();
}

template <class A>
double norm(const Grid& grid, const Eigen::MatrixBase<A>& f) {
  return std::sqrt((grid.weights().array() * f.derived().array().square()).sum());
}

/// Squared norm of f - g, evaluated without forming the difference vector.
template <class A, class B>
double squared_distance(const Grid& grid, const Eigen::MatrixBase<A>& f,
                        const Eigen::MatrixBase<B>& g) {
  return (grid.weights().array() * (f.derived().array() - g.derived().array()).square()).sum();
}

double inner_product(const Curve& f, const Curve& g);
double norm(const Curve& f);

Curve sample_mean(const FunctionalSample& s);

/// Eigendecomposition of an empirical covariance operator.
///
/// Eigenfunctions are the columns of `eigenfunctions` and are orthonormal in
/// the grid inner product. Eigenvalues are sorted descending and clamped at
/// zero. Each eigenfunction's largest-magnitude grid value is positive.
struct CovOp {
  GridPtr grid;
  VectorXd eigenvalues;
  MatrixXd eigenfunctions;

  Index size() const noexcept { return eigenvalues.size(); }
  /// Number of eigenvalues above `tol * max(1, largest eigenvalue)`.
  Index rank(double tol = 1e-12) const noexcept;
  /// sum_j lambda_j phi_j(t) phi_j(s), the grid covariance matrix.
  MatrixXd reconstruct() const;
};

/// Covariance operator n^-1 sum (X_i - center) (X_i - center)^T.
CovOp covariance_eig(const FunctionalSample& s, const Curve& center);
/// Same, from already-centered columns.
CovOp covariance_eig(const GridPtr& grid, const MatrixXd& centered);

/// Orthonormalizes columns in the grid inner product (modified Gram-Schmidt
/// with one reorthogonalization pass). Column j of the result depends only on
/// the first j+1 input columns. Throws rank_deficient when a residual norm
/// falls to 1e-10 or below.
MatrixXd gram_schmidt(const Grid& grid, const MatrixXd& columns);
std::vector<Curve> gram_schmidt(std::span<const Curve> curves);

}  // namespace fdstat
