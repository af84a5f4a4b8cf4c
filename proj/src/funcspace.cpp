#include "fdstat/funcspace.hpp"

#include <cmath>
#include <utility>

namespace fdstat {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::invalid_grid: return "invalid grid";
    case Errc::incompatible_grid: return "incompatible grid";
    case Errc::empty_sample: return "empty sample";
    case Errc::insufficient_sample: return "insufficient sample";
    case Errc::rank_deficient: return "rank deficient";
    case Errc::invalid_basis: return "invalid basis";
    case Errc::degenerate_scaling: return "degenerate scaling";
    case Errc::degenerate_data: return "degenerate data";
    case Errc::rank: return "rank error";
    case Errc::selection: return "selection error";
    case Errc::divergent_series: return "divergent series";
    case Errc::parse: return "parse error";
    case Errc::usage: return "usage error";
  }
  return "error";
}

Grid::Grid(VectorXd points, VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() < 2) throw Error(Errc::invalid_grid, "a grid needs at least 2 points");
  if (weights_.size() != points_.size())
    throw Error(Errc::invalid_grid, "one weight per grid point is required");
  for (Index k = 0; k < points_.size(); ++k) {
    if (!std::isfinite(points_[k]) || points_[k] < 0.0 || points_[k] > 1.0)
      throw Error(Errc::invalid_grid, "grid points must lie in [0,1]");
    if (k > 0 && !(points_[k] > points_[k - 1]))
      throw Error(Errc::invalid_grid, "grid points must be strictly increasing");
    if (!(weights_[k] > 0.0)) throw Error(Errc::invalid_grid, "weights must be positive");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw Error(Errc::invalid_grid, "weights must sum to 1");
}

bool Grid::compatible_with(const Grid& other) const noexcept {
  if (this == &other) return true;
  return points_.size() == other.points_.size() && points_ == other.points_ &&
         weights_ == other.weights_;
}

GridPtr make_grid(Index p) {
  if (p < 2) throw Error(Errc::invalid_grid, "p must be at least 2, got " + std::to_string(p));
  VectorXd points(p);
  for (Index k = 0; k < p; ++k) points[k] = static_cast<double>(k) / static_cast<double>(p - 1);
  points[p - 1] = 1.0;
  VectorXd weights = VectorXd::Constant(p, 1.0 / static_cast<double>(p - 1));
  weights[0] *= 0.5;
  weights[p - 1] *= 0.5;
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

GridPtr make_grid(VectorXd points) {
  const Index p = points.size();
  if (p < 2) throw Error(Errc::invalid_grid, "a grid needs at least 2 points");
  // Points read back from an equispaced grid get exactly its weights.
  GridPtr equispaced = make_grid(p);
  if (equispaced->points() == points) return equispaced;
  VectorXd weights = VectorXd::Zero(p);
  for (Index k = 0; k + 1 < p; ++k) {
    const double h = points[k + 1] - points[k];
    if (!(h > 0.0)) throw Error(Errc::invalid_grid, "grid points must be strictly increasing");
    weights[k] += 0.5 * h;
    weights[k + 1] += 0.5 * h;
  }
  weights /= weights.sum();
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

void require_compatible(const Grid& a, const Grid& b) {
  if (!a.compatible_with(b)) throw Error(Errc::incompatible_grid, "curves live on different grids");
}

Curve::Curve(GridPtr g, VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw Error(Errc::invalid_argument, "curve without grid");
  if (values.size() != grid->size())
    throw Error(Errc::incompatible_grid, "curve length " + std::to_string(values.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid->size()));
  if (!values.allFinite()) throw Error(Errc::invalid_argument, "curve values must be finite");
}

FunctionalSample::FunctionalSample(GridPtr grid, MatrixXd values, std::vector<std::string> labels)
    : grid_(std::move(grid)), values_(std::move(values)), labels_(std::move(labels)) {
  if (!grid_) throw Error(Errc::invalid_argument, "sample without grid");
  if (values_.cols() == 0) throw Error(Errc::empty_sample, "a sample needs at least one curve");
  if (values_.rows() != grid_->size())
    throw Error(Errc::incompatible_grid, "sample rows do not match grid size");
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != values_.cols())
    throw Error(Errc::invalid_argument, "labels must match curve count");
  if (!values_.allFinite()) throw Error(Errc::invalid_argument, "curve values must be finite");
}

namespace {

MatrixXd stack(const GridPtr& grid, std::span<const Curve> curves) {
  if (curves.empty()) throw Error(Errc::empty_sample, "a sample needs at least one curve");
  MatrixXd values(grid->size(), static_cast<Index>(curves.size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    require_compatible(*grid, *curves[i].grid);
    values.col(static_cast<Index>(i)) = curves[i].values;
  }
  return values;
}

}  // namespace

FunctionalSample::FunctionalSample(GridPtr grid, std::span<const Curve> curves)
    : FunctionalSample(grid, stack(grid, curves)) {}

double inner_product(const Curve& f, const Curve& g) {
  require_compatible(*f.grid, *g.grid);
  return inner_product(*f.grid, f.values, g.values);
}

double norm(const Curve& f) { return norm(*f.grid, f.values); }

Curve sample_mean(const FunctionalSample& s) {
  return Curve(s.grid(), s.values().rowwise().mean());
}

Index CovOp::rank(double tol) const noexcept {
  if (eigenvalues.size() == 0) return 0;
  const double cutoff = tol * std::max(1.0, eigenvalues[0]);
  Index r = 0;
  while (r < eigenvalues.size() && eigenvalues[r] > cutoff) ++r;
  return r;
}

MatrixXd CovOp::reconstruct() const {
  return eigenfunctions * eigenvalues.asDiagonal() * eigenfunctions.transpose();
}

CovOp covariance_eig(const FunctionalSample& s, const Curve& center) {
  require_compatible(*s.grid(), *center.grid);
  const MatrixXd centered = s.values().colwise() - center.values;
  return covariance_eig(s.grid(), centered);
}

CovOp covariance_eig(const GridPtr& grid, const MatrixXd& centered) {
  const VectorXd sqrt_w = grid->weights().cwiseSqrt();
  const MatrixXd scaled = sqrt_w.asDiagonal() * centered;
  const MatrixXd weighted_cov =
      (scaled * scaled.transpose()) / static_cast<double>(centered.cols());

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(weighted_cov);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::degenerate_data, "covariance eigendecomposition failed");

  const Index p = weighted_cov.rows();
  CovOp op{grid, VectorXd(p), MatrixXd(p, p)};
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  const VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();
  for (Index j = 0; j < p; ++j) {
    // Solver output is ascending.
    const Index src = p - 1 - j;
    double lambda = solver.eigenvalues()[src];
    if (lambda < -1e-10 * scale)
      throw Error(Errc::degenerate_data, "covariance has a negative eigenvalue");
    op.eigenvalues[j] = std::max(lambda, 0.0);

    VectorXd phi = inv_sqrt_w.asDiagonal() * solver.eigenvectors().col(src);
    Index peak = 0;
    phi.cwiseAbs().maxCoeff(&peak);
    if (phi[peak] < 0.0) phi = -phi;
    op.eigenfunctions.col(j) = phi;
  }
  return op;
}

MatrixXd gram_schmidt(const Grid& grid, const MatrixXd& columns) {
  if (columns.rows() != grid.size())
    throw Error(Errc::incompatible_grid, "columns do not match grid size");
  MatrixXd q(columns.rows(), columns.cols());
  for (Index j = 0; j < columns.cols(); ++j) {
    VectorXd v = columns.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) v -= inner_product(grid, q.col(i), v) * q.col(i);
    }
    const double r = norm(grid, v);
    if (!(r > 1e-10))
      throw Error(Errc::rank_deficient,
                  "input " + std::to_string(j) + " is linearly dependent on its predecessors");
    q.col(j) = v / r;
  }
  return q;
}

std::vector<Curve> gram_schmidt(std::span<const Curve> curves) {
  if (curves.empty()) return {};
  const GridPtr& grid = curves.front().grid;
  const FunctionalSample stacked(grid, curves);
  const MatrixXd q = gram_schmidt(*grid, stacked.values());
  std::vector<Curve> out;
  out.reserve(curves.size());
  for (Index j = 0; j < q.cols(); ++j) out.emplace_back(grid, q.col(j));
  return out;
}

}  // namespace fdstat
