#include "fdstat/twosample.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fdstat/parallel.hpp"

namespace fdstat {

TwoSampleData::TwoSampleData(FunctionalSample g1, FunctionalSample g2)
    : group1(std::move(g1)), group2(std::move(g2)) {
  require_compatible(*group1.grid(), *group2.grid());
  if (group1.size() < 2 || group2.size() < 2)
    throw Error(Errc::insufficient_sample, "each group needs at least 2 curves");
}

double TwoSampleData::scale() const noexcept {
  const auto a = static_cast<double>(n1());
  const auto b = static_cast<double>(n2());
  return std::sqrt(a * b / (a + b));
}

std::string to_string(TwoSampleMethod method) {
  switch (method) {
    case TwoSampleMethod::ITD: return "ITD";
    case TwoSampleMethod::IFD: return "IFD";
    case TwoSampleMethod::RHD: return "RHD";
    case TwoSampleMethod::KD: return "KD";
    case TwoSampleMethod::L2: return "L2";
    case TwoSampleMethod::SUP: return "SUP";
    case TwoSampleMethod::FINT: return "FINT";
    case TwoSampleMethod::FMAX: return "FMAX";
  }
  return "?";
}

TwoSampleMethod parse_two_sample_method(const std::string& name) {
  for (auto m : {TwoSampleMethod::ITD, TwoSampleMethod::IFD, TwoSampleMethod::RHD,
                 TwoSampleMethod::KD, TwoSampleMethod::L2, TwoSampleMethod::SUP,
                 TwoSampleMethod::FINT, TwoSampleMethod::FMAX}) {
    if (to_string(m) == name) return m;
  }
  throw Error(Errc::usage, "unknown two-sample method '" + name + "'");
}

std::vector<TwoSampleMethod> parse_two_sample_methods(const std::string& comma_list) {
  std::vector<TwoSampleMethod> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_two_sample_method(item));
  }
  if (out.empty()) throw Error(Errc::usage, "no methods given");
  return out;
}

bool is_depth_method(TwoSampleMethod method) {
  return method == TwoSampleMethod::ITD || method == TwoSampleMethod::IFD ||
         method == TwoSampleMethod::RHD || method == TwoSampleMethod::KD;
}

Curve two_sample_statistic(const TwoSampleData& d) {
  const VectorXd diff = d.group1.values().rowwise().mean() - d.group2.values().rowwise().mean();
  return Curve(d.group1.grid(), d.scale() * diff);
}

TwoSampleResample draw_two_sample_resample(const TwoSampleData& d, RngStream rng) {
  TwoSampleResample r;
  r.draw1.resize(static_cast<std::size_t>(d.n1()));
  r.draw2.resize(static_cast<std::size_t>(d.n2()));
  for (auto& i : r.draw1) i = static_cast<Index>(rng.index(static_cast<std::size_t>(d.n1())));
  for (auto& i : r.draw2) i = static_cast<Index>(rng.index(static_cast<std::size_t>(d.n2())));
  return r;
}

namespace {

MatrixXd residuals(const FunctionalSample& g) {
  return g.values().colwise() - VectorXd(g.values().rowwise().mean());
}

VectorXd drawn_mean(const MatrixXd& resid, const std::vector<Index>& draw) {
  VectorXd acc = VectorXd::Zero(resid.rows());
  for (Index i : draw) acc += resid.col(i);
  return acc / static_cast<double>(draw.size());
}

VectorXd bootstrap_statistic(const MatrixXd& resid1, const MatrixXd& resid2, double scale,
                             const TwoSampleResample& r) {
  return scale * (drawn_mean(resid1, r.draw1) - drawn_mean(resid2, r.draw2));
}

}  // namespace

VectorXd two_sample_bootstrap_statistic(const TwoSampleData& d, const TwoSampleResample& r) {
  return bootstrap_statistic(residuals(d.group1), residuals(d.group2), d.scale(), r);
}

TwoSampleData two_sample_bootstrap_groups(const TwoSampleData& d, const TwoSampleResample& r) {
  const auto n1 = static_cast<double>(d.n1());
  const auto n2 = static_cast<double>(d.n2());
  const VectorXd pooled =
      (n1 * d.group1.values().rowwise().mean() + n2 * d.group2.values().rowwise().mean()) / (n1 + n2);
  const MatrixXd resid1 = residuals(d.group1);
  const MatrixXd resid2 = residuals(d.group2);
  MatrixXd g1(resid1.rows(), d.n1());
  MatrixXd g2(resid2.rows(), d.n2());
  for (Index i = 0; i < d.n1(); ++i) g1.col(i) = pooled + resid1.col(r.draw1[static_cast<std::size_t>(i)]);
  for (Index i = 0; i < d.n2(); ++i) g2.col(i) = pooled + resid2.col(r.draw2[static_cast<std::size_t>(i)]);
  return TwoSampleData(FunctionalSample(d.group1.grid(), std::move(g1)),
                       FunctionalSample(d.group1.grid(), std::move(g2)));
}

BootstrapEnsemble residual_bootstrap_two(const TwoSampleData& d, Index B, RngStream rng,
                                         int workers) {
  if (B < 1) throw Error(Errc::invalid_argument, "B must be positive");
  const MatrixXd resid1 = residuals(d.group1);
  const MatrixXd resid2 = residuals(d.group2);
  MatrixXd stats(d.group1.grid()->size(), B);
  parallel_for(static_cast<std::size_t>(B), workers, [&](std::size_t b) {
    const auto r = draw_two_sample_resample(d, rng.child(stream_tag::bootstrap, b));
    stats.col(static_cast<Index>(b)) = bootstrap_statistic(resid1, resid2, d.scale(), r);
  });
  return {FunctionalSample(d.group1.grid(), std::move(stats)),
          "two-sample residual bootstrap; replicate b <- child(" +
              std::to_string(rng.key()) + ", bootstrap, b)"};
}

VectorXd pointwise_F(const TwoSampleData& d) {
  const auto n1 = static_cast<double>(d.n1());
  const auto n2 = static_cast<double>(d.n2());
  const double n = n1 + n2;
  constexpr double K = 2.0;
  const VectorXd mean1 = d.group1.values().rowwise().mean();
  const VectorXd mean2 = d.group2.values().rowwise().mean();
  const VectorXd pooled = (n1 * mean1 + n2 * mean2) / n;

  const VectorXd between =
      (n1 * (mean1 - pooled).array().square() + n2 * (mean2 - pooled).array().square()).matrix() /
      (K - 1.0);
  const VectorXd within = ((d.group1.values().colwise() - mean1).rowwise().squaredNorm() +
                           (d.group2.values().colwise() - mean2).rowwise().squaredNorm()) /
                          (n - K);

  VectorXd F(between.size());
  bool any_variance = false;
  for (Index k = 0; k < F.size(); ++k) {
    if (within[k] > 0.0) {
      F[k] = between[k] / within[k];
      any_variance = true;
    } else {
      F[k] = between[k] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  if (!any_variance)
    throw Error(Errc::degenerate_data, "no within-group variance at any grid point");
  return F;
}

double f_summary(const TwoSampleData& d, ScalarKind kind) {
  const VectorXd F = pointwise_F(d);
  if (!F.allFinite())
    throw Error(Errc::degenerate_data, "pointwise F is infinite where within-group variance vanishes");
  switch (kind) {
    case ScalarKind::FINT: return d.group1.grid()->weights().dot(F);
    case ScalarKind::FMAX: return F.maxCoeff();
    default: throw Error(Errc::invalid_argument, "f_summary supports FINT and FMAX only");
  }
}

DepthSpec depth_spec_for(TwoSampleMethod method, const TwoSampleOptions& options) {
  DepthSpec spec;
  spec.kernel = options.kernel;
  spec.projections = options.projections;
  spec.tiebreak = options.rhd_tiebreak;
  switch (method) {
    case TwoSampleMethod::KD:
      spec.kind = DepthKind::KD;
      spec.quantile_u = options.kd_u;
      break;
    case TwoSampleMethod::RHD:
      spec.kind = DepthKind::RHD;
      spec.quantile_u = options.rhd_u;
      break;
    case TwoSampleMethod::ITD: spec.kind = DepthKind::ITD; break;
    case TwoSampleMethod::IFD: spec.kind = DepthKind::IFD; break;
    default: throw Error(Errc::invalid_argument, to_string(method) + " is not a depth method");
  }
  return spec;
}

std::vector<TestReport> two_sample_tests(const TwoSampleData& d,
                                         std::span<const TwoSampleMethod> methods,
                                         const TwoSampleOptions& options, RngStream rng) {
  if (options.B < 1) throw Error(Errc::invalid_argument, "B must be positive");
  const Curve observed = two_sample_statistic(d);
  const auto B = static_cast<std::size_t>(options.B);

  bool need_f = false;
  for (auto m : methods) need_f = need_f || m == TwoSampleMethod::FINT || m == TwoSampleMethod::FMAX;

  const MatrixXd resid1 = residuals(d.group1);
  const MatrixXd resid2 = residuals(d.group2);
  MatrixXd stats(d.group1.grid()->size(), options.B);
  std::vector<double> fint(need_f ? B : 0);
  std::vector<double> fmax(need_f ? B : 0);
  parallel_for(B, options.workers, [&](std::size_t b) {
    const auto r = draw_two_sample_resample(d, rng.child(stream_tag::bootstrap, b));
    stats.col(static_cast<Index>(b)) = bootstrap_statistic(resid1, resid2, d.scale(), r);
    if (need_f) {
      const TwoSampleData boot = two_sample_bootstrap_groups(d, r);
      fint[b] = f_summary(boot, ScalarKind::FINT);
      fmax[b] = f_summary(boot, ScalarKind::FMAX);
    }
  });
  const BootstrapEnsemble ensemble{FunctionalSample(d.group1.grid(), std::move(stats)),
                                   "two-sample residual bootstrap"};

  std::vector<TestReport> reports;
  reports.reserve(methods.size());
  for (auto method : methods) {
    TestReport report;
    if (is_depth_method(method)) {
      report = depth_pvalue(observed, ensemble, depth_spec_for(method, options),
                            rng.child(stream_tag::directions),
                            PValueOptions{options.smoothed, options.calibration, options.workers});
    } else if (method == TwoSampleMethod::L2 || method == TwoSampleMethod::SUP) {
      const ScalarKind kind = method == TwoSampleMethod::L2 ? ScalarKind::L2 : ScalarKind::SUP;
      std::vector<double> values(B);
      for (std::size_t b = 0; b < B; ++b)
        values[b] = scalar_stat(ensemble.statistics.curve(static_cast<Index>(b)), kind);
      report = scalar_pvalue(scalar_stat(observed, kind), values, options.smoothed);
      report.scalar_kind = kind;
    } else {
      const ScalarKind kind = method == TwoSampleMethod::FINT ? ScalarKind::FINT : ScalarKind::FMAX;
      report = scalar_pvalue(f_summary(d, kind), kind == ScalarKind::FINT ? fint : fmax,
                             options.smoothed);
      report.scalar_kind = kind;
    }
    report.method = to_string(method);
    report.seed = rng.key();
    reports.push_back(std::move(report));
  }
  return reports;
}

TestReport two_sample_test(const TwoSampleData& d, TwoSampleMethod method,
                           const TwoSampleOptions& options, RngStream rng) {
  const TwoSampleMethod one[] = {method};
  return two_sample_tests(d, one, options, rng).front();
}

}  // namespace fdstat
