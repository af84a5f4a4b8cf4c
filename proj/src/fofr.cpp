#include "fdstat/fofr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fdstat/parallel.hpp"

namespace fdstat {

FoFRData::FoFRData(FunctionalSample x, FunctionalSample y, Curve new_x)
    : X(std::move(x)), Y(std::move(y)), x0(std::move(new_x)) {
  require_compatible(*X.grid(), *Y.grid());
  require_compatible(*X.grid(), *x0.grid);
  if (X.size() != Y.size())
    throw Error(Errc::invalid_argument, "regressor and response counts differ");
  if (X.size() < 10) throw Error(Errc::insufficient_sample, "regression needs at least 10 pairs");
}

VectorXd stable_mean(const MatrixXd& columns) {
  const VectorXd first = columns.col(0);
  return first + (columns.colwise() - first).rowwise().mean();
}

VectorXd FPCRFit::coordinates(const Eigen::Ref<const VectorXd>& x) const {
  const VectorXd centered = x - xbar;
  const VectorXd& w = cov.grid->weights();
  return cov.eigenfunctions.leftCols(levels()).transpose() * w.cwiseProduct(centered);
}

VectorXd FPCRFit::predict(const Eigen::Ref<const VectorXd>& x, Index level) const {
  if (level < 0 || level > levels())
    throw Error(Errc::rank, "truncation " + std::to_string(level) + " exceeds stored levels");
  const VectorXd c = coordinates(x);
  VectorXd out = VectorXd::Zero(delta.rows());
  for (Index j = 0; j < level; ++j) out += (c[j] / cov.eigenvalues[j]) * delta.col(j);
  return out;
}

FPCRFit fpcr_fit(const FunctionalSample& X, const FunctionalSample& Y, Index J) {
  return fpcr_fit(X, Y, J, J, J);
}

FPCRFit fpcr_fit(const FunctionalSample& X, const FunctionalSample& Y, Index J, Index J_res,
                 Index J_cen) {
  require_compatible(*X.grid(), *Y.grid());
  if (X.size() != Y.size())
    throw Error(Errc::invalid_argument, "regressor and response counts differ");
  if (J < 1 || J_res < 1 || J_cen < 1)
    throw Error(Errc::invalid_argument, "truncation levels must be positive");

  FPCRFit fit;
  fit.J = J;
  fit.J_res = J_res;
  fit.J_cen = J_cen;
  fit.xbar = stable_mean(X.values());
  fit.ybar = stable_mean(Y.values());
  const MatrixXd xc = X.values().colwise() - fit.xbar;
  const MatrixXd yc = Y.values().colwise() - fit.ybar;
  fit.cov = covariance_eig(X.grid(), xc);
  fit.rank = fit.cov.rank(1e-12);

  const Index K = std::max({J, J_res, J_cen});
  if (K > fit.rank)
    throw Error(Errc::rank, "truncation " + std::to_string(K) + " exceeds numerical rank " +
                                std::to_string(fit.rank));
  const VectorXd& w = X.grid()->weights();
  fit.scores = xc.transpose() * (w.asDiagonal() * fit.cov.eigenfunctions.leftCols(K));
  fit.delta = yc * fit.scores / static_cast<double>(X.size());
  return fit;
}

double tau_scale(const FPCRFit& fit, const Curve& x) {
  const VectorXd c = fit.coordinates(x.values);
  double tau = 0.0;
  for (Index j = 0; j < fit.J; ++j) tau += c[j] * c[j] / fit.cov.eigenvalues[j];
  if (!(tau >= 1e-12))
    throw Error(Errc::degenerate_scaling,
                "scaling term vanishes; the new regressor is at the regressor mean");
  return tau;
}

Curve fofr_statistic(const FoFRData& d, const FPCRFit& fit) {
  const double tau = tau_scale(fit, d.x0);
  const double factor = std::sqrt(static_cast<double>(fit.n()) / tau);
  return Curve(d.X.grid(), factor * fit.predict(d.x0.values, fit.J));
}

MatrixXd fofr_residuals(const FoFRData& d, const FPCRFit& fit) {
  const MatrixXd yc = d.Y.values().colwise() - fit.ybar;
  const VectorXd inv_gamma =
      fit.cov.eigenvalues.head(fit.J_res).cwiseInverse();
  // B_{J_res}(X_i - xbar) = sum_j delta_j scores(i,j) / gamma_j
  return yc - fit.delta.leftCols(fit.J_res) * inv_gamma.asDiagonal() *
                  fit.scores.leftCols(fit.J_res).transpose();
}

BootstrapEnsemble fofr_bootstrap(const FoFRData& d, const FPCRFit& fit, Index B, RngStream rng,
                                 int workers) {
  if (B < 1) throw Error(Errc::invalid_argument, "B must be positive");
  const Index n = fit.n();
  const double tau = tau_scale(fit, d.x0);
  const double factor = std::sqrt(static_cast<double>(n) / tau);
  const MatrixXd resid = fofr_residuals(d, fit);
  const VectorXd c0 = fit.coordinates(d.x0.values);

  // B*_J (x0 - xbar) = sum_i a_i (Y*_i - mean Y*), with
  // a_i = n^-1 sum_{j<=J} c0_j scores(i,j) / gamma_j. Since sum_i a_i = 0 the
  // response mean drops out, leaving a fixed part from the centering model
  // plus a_i applied to the drawn residuals.
  VectorXd weighted_c0 = VectorXd::Zero(fit.levels());
  for (Index j = 0; j < fit.J; ++j) weighted_c0[j] = c0[j] / fit.cov.eigenvalues[j];
  const VectorXd a = fit.scores * weighted_c0 / static_cast<double>(n);

  const MatrixXd centering_fitted =
      fit.delta.leftCols(fit.J_cen) *
      fit.cov.eigenvalues.head(fit.J_cen).cwiseInverse().asDiagonal() *
      fit.scores.leftCols(fit.J_cen).transpose();  // p x n, B_{J_cen}(X_i - xbar)
  const VectorXd drift = centering_fitted * a - fit.predict(d.x0.values, fit.J_cen);

  MatrixXd stats(resid.rows(), B);
  parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b) {
    RngStream stream = rng.child(stream_tag::bootstrap, b);
    VectorXd acc = drift;
    for (Index i = 0; i < n; ++i) {
      const auto drawn = static_cast<Index>(stream.index(static_cast<std::size_t>(n)));
      acc += a[i] * resid.col(drawn);
    }
    stats.col(static_cast<Index>(b)) = factor * acc;
  });
  return {FunctionalSample(d.X.grid(), std::move(stats)),
          "fofr residual bootstrap; replicate b <- child(" + std::to_string(rng.key()) +
              ", bootstrap, b)"};
}

std::vector<std::vector<Index>> cv_folds(Index n, Index G, RngStream rng) {
  if (G < 2 || n < G) throw Error(Errc::invalid_argument, "need n >= G >= 2 for cross-validation");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(G));
  const Index base = n / G;
  const Index extra = n % G;
  Index pos = 0;
  for (Index g = 0; g < G; ++g) {
    const Index size = base + (g < extra ? 1 : 0);
    folds[static_cast<std::size_t>(g)].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

namespace {

MatrixXd select_columns(const MatrixXd& m, const std::vector<Index>& idx) {
  MatrixXd out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = m.col(idx[k]);
  return out;
}

}  // namespace

CvSelection select_J_res_cv(const FunctionalSample& X, const FunctionalSample& Y,
                            std::span<const Index> candidates, Index G, RngStream rng) {
  require_compatible(*X.grid(), *Y.grid());
  const Index n = X.size();
  if (Y.size() != n) throw Error(Errc::invalid_argument, "regressor and response counts differ");
  const auto folds = cv_folds(n, G, rng);
  const Grid& grid = *X.grid();

  std::vector<Index> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.empty() || sorted.front() < 1)
    throw Error(Errc::invalid_argument, "candidates must be positive");

  std::vector<double> total(sorted.size(), 0.0);
  std::vector<bool> usable(sorted.size(), true);
  for (const auto& test : folds) {
    std::vector<Index> train;
    std::vector<bool> in_test(static_cast<std::size_t>(n), false);
    for (Index i : test) in_test[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < n; ++i)
      if (!in_test[static_cast<std::size_t>(i)]) train.push_back(i);

    const FunctionalSample Xtr(X.grid(), select_columns(X.values(), train));
    const FunctionalSample Ytr(Y.grid(), select_columns(Y.values(), train));
    const Index rank = covariance_eig(X.grid(), Xtr.values().colwise() - stable_mean(Xtr.values())).rank(1e-12);
    Index top = 0;
    for (std::size_t c = 0; c < sorted.size(); ++c) {
      if (sorted[c] > rank) usable[c] = false;
      if (usable[c]) top = std::max(top, sorted[c]);
    }
    if (top == 0) continue;
    const FPCRFit fit = fpcr_fit(Xtr, Ytr, top);

    // Cumulative predictions: prediction at level J adds one term per level.
    std::vector<double> fold_error(sorted.size(), 0.0);
    for (Index i : test) {
      const VectorXd c = fit.coordinates(X.values().col(i));
      VectorXd residual = Y.values().col(i) - fit.ybar;
      Index level = 0;
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (!usable[k]) continue;
        for (; level < sorted[k]; ++level)
          residual -= (c[level] / fit.cov.eigenvalues[level]) * fit.delta.col(level);
        fold_error[k] += inner_product(grid, residual, residual);
      }
    }
    for (std::size_t k = 0; k < sorted.size(); ++k)
      total[k] += fold_error[k] / static_cast<double>(test.size());
  }

  CvSelection out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!usable[k]) continue;
    const double err = total[k] / static_cast<double>(G);
    out.candidates.push_back(sorted[k]);
    out.errors.push_back(err);
    if (err < best) {
      best = err;
      out.selected = sorted[k];
    }
  }
  if (out.selected == 0)
    throw Error(Errc::selection, "every truncation candidate exceeds a training rank");
  return out;
}

FveSelection select_J_fve(std::span<const double> gamma_hat, Index J_cen, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(Errc::invalid_argument, "rho must lie in (0,1)");
  const double largest = gamma_hat.empty() ? 0.0 : *std::max_element(gamma_hat.begin(), gamma_hat.end());
  const double cutoff = 1e-12 * std::max(1.0, largest);
  Index positive = 0;
  double total = 0.0;
  for (double g : gamma_hat) {
    if (g > cutoff) {
      ++positive;
      total += g;
    }
  }
  if (positive == 0) throw Error(Errc::selection, "no positive eigenvalues");
  double cumulative = 0.0;
  for (Index J = 1; J <= positive; ++J) {
    cumulative += gamma_hat[static_cast<std::size_t>(J - 1)];
    if (J >= J_cen && cumulative / total >= rho) return {J, false};
  }
  return {positive, true};
}

std::string to_string(FoFRMethod method) {
  switch (method) {
    case FoFRMethod::RHD: return "RHD";
    case FoFRMethod::KD: return "KD";
    case FoFRMethod::L2: return "L2";
    case FoFRMethod::SUP: return "SUP";
  }
  return "?";
}

std::vector<FoFRMethod> parse_fofr_methods(const std::string& comma_list) {
  std::vector<FoFRMethod> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool found = false;
    for (auto m : {FoFRMethod::RHD, FoFRMethod::KD, FoFRMethod::L2, FoFRMethod::SUP}) {
      if (to_string(m) == item) {
        out.push_back(m);
        found = true;
      }
    }
    if (!found) throw Error(Errc::usage, "unknown regression method '" + item + "'");
  }
  if (out.empty()) throw Error(Errc::usage, "no methods given");
  return out;
}

FoFRResult fofr_tests(const FoFRData& d, std::span<const FoFRMethod> methods,
                      const FoFROptions& options, RngStream rng) {
  std::vector<Index> candidates;
  for (Index j = 1; j <= options.max_candidate; ++j) candidates.push_back(j);

  FoFRResult result;
  result.cv = select_J_res_cv(d.X, d.Y, candidates, options.folds, rng.child(stream_tag::folds));
  result.J_res = result.cv.selected;
  result.J_cen = result.J_res;

  const FPCRFit spectrum = fpcr_fit(d.X, d.Y, 1);
  const std::vector<double> gamma(spectrum.cov.eigenvalues.data(),
                                  spectrum.cov.eigenvalues.data() + spectrum.cov.size());
  const FveSelection fve = select_J_fve(gamma, result.J_cen, options.rho);
  result.J = fve.J;
  result.fve_warning = fve.warning;

  const FPCRFit fit = fpcr_fit(d.X, d.Y, result.J, result.J_res, result.J_cen);
  const Curve observed = fofr_statistic(d, fit);
  const BootstrapEnsemble ensemble = fofr_bootstrap(d, fit, options.B, rng, options.workers);

  for (auto method : methods) {
    TestReport report;
    if (method == FoFRMethod::RHD || method == FoFRMethod::KD) {
      DepthSpec spec;
      spec.kind = method == FoFRMethod::RHD ? DepthKind::RHD : DepthKind::KD;
      spec.quantile_u = method == FoFRMethod::RHD ? options.rhd_u : options.kd_u;
      spec.kernel = options.kernel;
      spec.projections = options.projections;
      spec.tiebreak = options.rhd_tiebreak;
      report = depth_pvalue(observed, ensemble, spec, rng.child(stream_tag::directions),
                            PValueOptions{options.smoothed, options.calibration, options.workers});
    } else {
      const ScalarKind kind = method == FoFRMethod::L2 ? ScalarKind::L2 : ScalarKind::SUP;
      std::vector<double> values(static_cast<std::size_t>(ensemble.B()));
      for (Index b = 0; b < ensemble.B(); ++b)
        values[static_cast<std::size_t>(b)] = scalar_stat(ensemble.statistics.curve(b), kind);
      report = scalar_pvalue(scalar_stat(observed, kind), values, options.smoothed);
      report.scalar_kind = kind;
    }
    report.method = to_string(method);
    report.seed = rng.key();
    report.extras["J"] = static_cast<double>(result.J);
    report.extras["J_res"] = static_cast<double>(result.J_res);
    report.extras["J_cen"] = static_cast<double>(result.J_cen);
    result.reports.push_back(std::move(report));
  }
  return result;
}

TestReport fofr_test(const FoFRData& d, FoFRMethod method, const FoFROptions& options,
                     RngStream rng) {
  const FoFRMethod one[] = {method};
  return fofr_tests(d, one, options, rng).reports.front();
}

}  // namespace fdstat
