#include "fdstat/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdstat {

namespace {

// Fixed-order loops: query curves and ensemble members that hold identical
// values must project to identical doubles, otherwise exact ties at zero in
// the halfspace counts would depend on memory alignment.
double weighted_dot(const double* w, const double* a, const double* b, Index p) {
  double acc = 0.0;
  for (Index k = 0; k < p; ++k) acc += w[k] * a[k] * b[k];
  return acc;
}

double weighted_sq_dist(const double* w, const double* a, const double* b, Index p) {
  double acc = 0.0;
  for (Index k = 0; k < p; ++k) {
    const double d = a[k] - b[k];
    acc += w[k] * d * d;
  }
  return acc;
}

double median_in_place(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::size_t quantile_index(double u, std::size_t m) {
  // 1-based ceil(u*m); the slack keeps products like 0.01 * 39800 from
  // rounding up to the next index.
  const double scaled = u * static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  return std::clamp<std::size_t>(k, 1, m);
}

// ---------------------------------------------------------------------------

class KernelDepth final : public DepthFunction {
 public:
  KernelDepth(const DepthSpec& spec, FunctionalSample ensemble)
      : spec_(spec), ensemble_(std::move(ensemble)) {
    const Index n = ensemble_.size();
    const Index p = ensemble_.grid()->size();
    const double* w = ensemble_.grid()->weights().data();
    distances_.resize(n, n);
    for (Index i = 0; i < n; ++i) {
      distances_(i, i) = 0.0;
      for (Index j = 0; j < i; ++j) {
        const double d = std::sqrt(
            weighted_sq_dist(w, ensemble_.values().col(i).data(), ensemble_.values().col(j).data(), p));
        distances_(i, j) = d;
        distances_(j, i) = d;
      }
    }
    if (spec_.bandwidth) {
      bandwidth_ = *spec_.bandwidth;
    } else {
      if (n < 2) throw Error(Errc::insufficient_sample, "kernel bandwidth needs at least 2 curves");
      bandwidth_ = bandwidth_from_distances();
    }
  }

  DepthValue evaluate(const Eigen::Ref<const VectorXd>& x) const override {
    const Index n = ensemble_.size();
    const Index p = ensemble_.grid()->size();
    const double* w = ensemble_.grid()->weights().data();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = std::sqrt(weighted_sq_dist(w, x.data(), ensemble_.values().col(i).data(), p));
      acc += kernel_value(spec_.kernel, d / bandwidth_);
    }
    return {acc / (static_cast<double>(n) * bandwidth_), std::nullopt};
  }

  DepthValue evaluate_member(Index m) const override {
    const Index n = ensemble_.size();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += kernel_value(spec_.kernel, distances_(m, i) / bandwidth_);
    return {acc / (static_cast<double>(n) * bandwidth_), std::nullopt};
  }

  const FunctionalSample& ensemble() const override { return ensemble_; }
  double bandwidth() const { return bandwidth_; }

 private:
  double bandwidth_from_distances() const {
    const Index n = ensemble_.size();
    std::vector<double> pairs;
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    double smallest_positive = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < i; ++j) {
        const double d = distances_(i, j);
        pairs.push_back(d);
        if (d > 0.0) smallest_positive = std::min(smallest_positive, d);
      }
    }
    // Each unordered distance appears twice among the n(n-1) ordered pairs,
    // so ordered index k sits at unordered index ceil(k/2).
    const std::size_t k = quantile_index(spec_.quantile_u, 2 * pairs.size());
    const std::size_t pos = (k + 1) / 2 - 1;
    std::nth_element(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(pos), pairs.end());
    const double h = pairs[pos];
    if (h > 0.0) return h;
    return std::isfinite(smallest_positive) ? smallest_positive : 1.0;
  }

  DepthSpec spec_;
  FunctionalSample ensemble_;
  MatrixXd distances_;
  double bandwidth_ = 1.0;
};

// ---------------------------------------------------------------------------

class HalfspaceDepth final : public DepthFunction {
 public:
  HalfspaceDepth(FunctionalSample ensemble, RhdDirections pool)
      : ensemble_(std::move(ensemble)), pool_(std::move(pool)) {
    const Index n = ensemble_.size();
    const Index p = ensemble_.grid()->size();
    const double* w = ensemble_.grid()->weights().data();
    const Index r = static_cast<Index>(pool_.retained.size());
    projections_.resize(n, r);
    sorted_.resize(n, r);
    for (Index m = 0; m < r; ++m) {
      const double* v = pool_.directions.col(pool_.retained[m]).data();
      for (Index i = 0; i < n; ++i)
        projections_(i, m) = weighted_dot(w, ensemble_.values().col(i).data(), v, p);
      sorted_.col(m) = projections_.col(m);
      std::sort(sorted_.col(m).begin(), sorted_.col(m).end());
    }
  }

  DepthValue evaluate(const Eigen::Ref<const VectorXd>& x) const override {
    const Index p = ensemble_.grid()->size();
    const double* w = ensemble_.grid()->weights().data();
    const Index r = static_cast<Index>(pool_.retained.size());
    VectorXd query(r);
    for (Index m = 0; m < r; ++m)
      query[m] = weighted_dot(w, x.data(), pool_.directions.col(pool_.retained[m]).data(), p);
    return from_projections(query);
  }

  DepthValue evaluate_member(Index i) const override {
    return from_projections(projections_.row(i).transpose());
  }

  const FunctionalSample& ensemble() const override { return ensemble_; }

 private:
  DepthValue from_projections(const VectorXd& query) const {
    const Index n = ensemble_.size();
    const Index r = query.size();
    std::vector<Index> counts(static_cast<std::size_t>(r));
    Index best = n;
    for (Index m = 0; m < r; ++m) {
      // #{i : <X_i, v> >= <x, v>}
      const auto col = sorted_.col(m);
      const auto it = std::lower_bound(col.begin(), col.end(), query[m]);
      counts[static_cast<std::size_t>(m)] = static_cast<Index>(col.end() - it);
      best = std::min(best, counts[static_cast<std::size_t>(m)]);
    }

    // Outlyingness along the average minimizing direction. Projections onto
    // the average are averages of projections, so no re-projection is needed.
    VectorXd avg_proj = VectorXd::Zero(n);
    double avg_query = 0.0;
    Index minimizers = 0;
    for (Index m = 0; m < r; ++m) {
      if (counts[static_cast<std::size_t>(m)] != best) continue;
      avg_proj += projections_.col(m);
      avg_query += query[m];
      ++minimizers;
    }
    avg_proj /= static_cast<double>(minimizers);
    avg_query /= static_cast<double>(minimizers);

    std::vector<double> work(avg_proj.data(), avg_proj.data() + n);
    const double med = median_in_place(work);
    for (Index i = 0; i < n; ++i) work[static_cast<std::size_t>(i)] = std::abs(avg_proj[i] - med);
    double spread = median_in_place(work);
    if (!(spread > 0.0)) spread = (avg_proj.array() - med).abs().mean();
    const double deviation = std::abs(avg_query - med);
    const double outlyingness = spread > 0.0 ? deviation / spread : deviation;

    return {static_cast<double>(best) / static_cast<double>(n), outlyingness};
  }

  FunctionalSample ensemble_;
  RhdDirections pool_;
  MatrixXd projections_;  // n x retained
  MatrixXd sorted_;       // each column sorted ascending
};

// ---------------------------------------------------------------------------

class PointwiseDepth final : public DepthFunction {
 public:
  PointwiseDepth(FunctionalSample ensemble, bool infimal)
      : ensemble_(std::move(ensemble)), infimal_(infimal) {
    sorted_ = ensemble_.values().transpose();  // n x p
    for (Index k = 0; k < sorted_.cols(); ++k)
      std::sort(sorted_.col(k).begin(), sorted_.col(k).end());
  }

  DepthValue evaluate(const Eigen::Ref<const VectorXd>& x) const override {
    const Index n = ensemble_.size();
    const Index p = ensemble_.grid()->size();
    const VectorXd& w = ensemble_.grid()->weights();
    double infimum = std::numeric_limits<double>::infinity();
    double integral = 0.0;
    for (Index k = 0; k < p; ++k) {
      const auto col = sorted_.col(k);
      const auto below = std::upper_bound(col.begin(), col.end(), x[k]) - col.begin();
      const auto above = col.end() - std::lower_bound(col.begin(), col.end(), x[k]);
      const double d = static_cast<double>(std::min(below, above)) / static_cast<double>(n);
      infimum = std::min(infimum, d);
      integral += w[k] * d;
    }
    // Infimal depth ties are common; the integrated depth orders them.
    if (infimal_) return {infimum, 1.0 - integral};
    return {integral, std::nullopt};
  }

  const FunctionalSample& ensemble() const override { return ensemble_; }

 private:
  FunctionalSample ensemble_;
  bool infimal_;
  MatrixXd sorted_;
};

}  // namespace

std::string to_string(DepthKind kind) {
  switch (kind) {
    case DepthKind::KD: return "KD";
    case DepthKind::RHD: return "RHD";
    case DepthKind::ITD: return "ITD";
    case DepthKind::IFD: return "IFD";
  }
  return "?";
}

std::string to_string(KernelKind kind) {
  return kind == KernelKind::gaussian ? "gaussian" : "laplace";
}

DepthKind parse_depth_kind(const std::string& name) {
  if (name == "KD") return DepthKind::KD;
  if (name == "RHD") return DepthKind::RHD;
  if (name == "ITD") return DepthKind::ITD;
  if (name == "IFD") return DepthKind::IFD;
  throw Error(Errc::usage, "unknown depth '" + name + "'");
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "gaussian") return KernelKind::gaussian;
  if (name == "laplace") return KernelKind::laplace;
  throw Error(Errc::usage, "unknown kernel '" + name + "'");
}

void DepthSpec::validate() const {
  if (!(quantile_u > 0.0 && quantile_u < 1.0))
    throw Error(Errc::invalid_argument, "quantile level u must lie in (0,1)");
  if (projections < 1) throw Error(Errc::invalid_argument, "projection count must be positive");
  if (bandwidth && !(*bandwidth > 0.0))
    throw Error(Errc::invalid_argument, "bandwidth must be positive");
}

double kernel_value(KernelKind kernel, double t) {
  switch (kernel) {
    case KernelKind::gaussian: return std::exp(-0.5 * t * t);
    case KernelKind::laplace: return std::exp(-t);
  }
  return 0.0;
}

double quantile_order_statistic(std::vector<double> values, double u) {
  if (values.empty()) throw Error(Errc::insufficient_sample, "quantile of an empty list");
  const std::size_t pos = quantile_index(u, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(pos), values.end());
  return values[pos];
}

double kd_bandwidth(const FunctionalSample& ensemble, double u) {
  if (ensemble.size() < 2)
    throw Error(Errc::insufficient_sample, "kernel bandwidth needs at least 2 curves");
  DepthSpec spec;
  spec.quantile_u = u;
  spec.validate();
  return KernelDepth(spec, ensemble).bandwidth();
}

DepthValue kd_depth(const Curve& x, const FunctionalSample& ensemble, const DepthSpec& spec) {
  require_compatible(*x.grid, *ensemble.grid());
  spec.validate();
  return KernelDepth(spec, ensemble).evaluate(x.values);
}

double kd_gaussian_oracle(const Curve& x, std::span<const double> eigenvalues,
                          std::span<const Curve> eigenfunctions) {
  if (eigenvalues.size() != eigenfunctions.size())
    throw Error(Errc::invalid_basis, "one eigenvalue per eigenfunction is required");
  const Grid& grid = *x.grid;
  for (std::size_t i = 0; i < eigenfunctions.size(); ++i) {
    require_compatible(grid, *eigenfunctions[i].grid);
    if (!(eigenvalues[i] >= 0.0)) throw Error(Errc::invalid_basis, "eigenvalues must be nonnegative");
    for (std::size_t j = 0; j <= i; ++j) {
      const double ip = inner_product(eigenfunctions[i], eigenfunctions[j]);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > 1e-8)
        throw Error(Errc::invalid_basis, "eigenfunctions are not orthonormal");
    }
  }
  double log_det = 0.0;
  double quad = 0.0;
  double in_span = 0.0;
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double c = inner_product(x, eigenfunctions[j]);
    log_det += std::log1p(eigenvalues[j]);
    quad += c * c / (1.0 + eigenvalues[j]);
    in_span += c * c;
  }
  const double residual = std::max(0.0, norm(x) * norm(x) - in_span);
  return std::exp(-0.5 * log_det - 0.5 * (quad + residual));
}

RhdDirections rhd_directions(const FunctionalSample& ensemble, int M, double u, RngStream& rng) {
  if (M < 1) throw Error(Errc::invalid_argument, "projection count must be positive");
  if (!(u > 0.0 && u < 1.0)) throw Error(Errc::invalid_argument, "quantile level u must lie in (0,1)");
  const Grid& grid = *ensemble.grid();
  const Index p = grid.size();
  const Index n = ensemble.size();
  const double* w = grid.weights().data();

  RhdDirections pool;
  pool.directions.resize(p, M);
  for (Index m = 0; m < M; ++m) {
    for (Index k = 0; k < p; ++k) pool.directions(k, m) = rng.normal();
    pool.directions.col(m) /= norm(grid, pool.directions.col(m));
  }

  // ||Gamma^{1/2} v||^2 = <Gamma v, v> = n^-1 sum_i <X_i - mean, v>^2
  const MatrixXd centered = ensemble.values().colwise() - ensemble.values().rowwise().mean();
  pool.dispersion.resize(M);
  for (Index m = 0; m < M; ++m) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double s = weighted_dot(w, centered.col(i).data(), pool.directions.col(m).data(), p);
      acc += s * s;
    }
    pool.dispersion[m] = std::sqrt(acc / static_cast<double>(n));
  }

  pool.threshold = quantile_order_statistic(
      std::vector<double>(pool.dispersion.data(), pool.dispersion.data() + M), u);
  for (Index m = 0; m < M; ++m)
    if (pool.dispersion[m] >= pool.threshold) pool.retained.push_back(m);
  if (pool.retained.empty()) {
    Index best = 0;
    pool.dispersion.maxCoeff(&best);
    pool.retained.push_back(best);
  }
  return pool;
}

DepthValue rhd_depth(const Curve& x, const FunctionalSample& ensemble, const RhdDirections& pool) {
  require_compatible(*x.grid, *ensemble.grid());
  return HalfspaceDepth(ensemble, pool).evaluate(x.values);
}

DepthValue rhd_depth(const Curve& x, const FunctionalSample& ensemble, const DepthSpec& spec,
                     RngStream& rng) {
  require_compatible(*x.grid, *ensemble.grid());
  spec.validate();
  if (ensemble.size() < 2)
    throw Error(Errc::insufficient_sample, "halfspace depth needs at least 2 curves");
  return rhd_depth(x, ensemble, rhd_directions(ensemble, spec.projections, spec.quantile_u, rng));
}

double univariate_halfspace(double x, std::span<const double> sample) {
  if (sample.empty()) throw Error(Errc::insufficient_sample, "halfspace depth of an empty sample");
  std::size_t below = 0;
  std::size_t above = 0;
  for (double s : sample) {
    if (s <= x) ++below;
    if (s >= x) ++above;
  }
  return static_cast<double>(std::min(below, above)) / static_cast<double>(sample.size());
}

DepthValue itd_depth(const Curve& x, const FunctionalSample& ensemble) {
  require_compatible(*x.grid, *ensemble.grid());
  return PointwiseDepth(ensemble, false).evaluate(x.values);
}

DepthValue ifd_depth(const Curve& x, const FunctionalSample& ensemble) {
  require_compatible(*x.grid, *ensemble.grid());
  return PointwiseDepth(ensemble, true).evaluate(x.values);
}

std::unique_ptr<DepthFunction> make_depth_function(const DepthSpec& spec,
                                                   const FunctionalSample& ensemble,
                                                   RngStream rng) {
  spec.validate();
  switch (spec.kind) {
    case DepthKind::KD:
      return std::make_unique<KernelDepth>(spec, ensemble);
    case DepthKind::RHD:
      if (ensemble.size() < 2)
        throw Error(Errc::insufficient_sample, "halfspace depth needs at least 2 curves");
      return std::make_unique<HalfspaceDepth>(
          ensemble, rhd_directions(ensemble, spec.projections, spec.quantile_u, rng));
    case DepthKind::ITD:
      return std::make_unique<PointwiseDepth>(ensemble, false);
    case DepthKind::IFD:
      return std::make_unique<PointwiseDepth>(ensemble, true);
  }
  throw Error(Errc::invalid_argument, "unknown depth kind");
}

}  // namespace fdstat
