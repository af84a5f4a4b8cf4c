#include "fdstat/simgen.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace fdstat {

namespace {

// 2 * sum_{j>=1} j^-a: partial sum to N plus the midpoint of the integral
// bracket for the tail, whose half-width (N^-a / 2 at most) is below 1e-15.
double twice_zeta(double a) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(a); it != cache.end()) return it->second;

  constexpr long N = 1'000'000;
  double partial = 0.0;
  for (long j = N; j >= 1; --j) partial += std::pow(static_cast<double>(j), -a);
  const double lower = std::pow(static_cast<double>(N + 1), 1.0 - a) / (a - 1.0);
  const double upper = std::pow(static_cast<double>(N), 1.0 - a) / (a - 1.0);
  const double value = 2.0 * (partial + 0.5 * (lower + upper));
  cache.emplace(a, value);
  return value;
}

double chebyshev(Index k, double s) {
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = s;
  for (Index j = 2; j <= k; ++j) {
    const double next = 2.0 * s * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

std::vector<double> eigenvalues_from_decay(double a, Index J) {
  if (!(a > 2.0)) throw Error(Errc::divergent_series, "decay rate must exceed 2");
  if (J < 1) throw Error(Errc::invalid_argument, "need at least one eigenvalue");
  std::vector<double> gamma(static_cast<std::size_t>(J));
  gamma[0] = twice_zeta(a);
  for (Index j = 1; j < J; ++j)
    gamma[static_cast<std::size_t>(j)] =
        gamma[static_cast<std::size_t>(j - 1)] - 2.0 * std::pow(static_cast<double>(j), -a);
  return gamma;
}

EigenProfile EigenProfile::from_decay(double a, Index J_true) {
  return EigenProfile{a, J_true, eigenvalues_from_decay(a, J_true)};
}

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::tri: return "tri";
    case BasisKind::mono: return "mono";
    case BasisKind::cheb: return "cheb";
    case BasisKind::spl: return "spl";
  }
  return "?";
}

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::N1: return "N1";
    case ScoreKind::NN: return "NN";
    case ScoreKind::NE: return "NE";
  }
  return "?";
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Mag: return "Mag";
    case ShapeKind::Jump: return "Jump";
    case ShapeKind::Peak: return "Peak";
    case ShapeKind::Lin: return "Lin";
    case ShapeKind::Quad: return "Quad";
    case ShapeKind::Cub: return "Cub";
    case ShapeKind::Wig: return "Wig";
  }
  return "?";
}

BasisKind parse_basis_kind(const std::string& name) {
  for (auto k : {BasisKind::tri, BasisKind::mono, BasisKind::cheb, BasisKind::spl})
    if (to_string(k) == name) return k;
  throw Error(Errc::usage, "unknown basis '" + name + "'");
}

ScoreKind parse_score_kind(const std::string& name) {
  for (auto k : {ScoreKind::N1, ScoreKind::NN, ScoreKind::NE})
    if (to_string(k) == name) return k;
  throw Error(Errc::usage, "unknown score type '" + name + "'");
}

ShapeKind parse_shape_kind(const std::string& name) {
  for (auto k : {ShapeKind::Mag, ShapeKind::Jump, ShapeKind::Peak, ShapeKind::Lin,
                 ShapeKind::Quad, ShapeKind::Cub, ShapeKind::Wig})
    if (to_string(k) == name) return k;
  throw Error(Errc::usage, "unknown shape '" + name + "'");
}

MatrixXd cubic_bspline_basis(Index count, const Grid& grid) {
  constexpr Index order = 4;
  if (count < order) throw Error(Errc::invalid_argument, "a cubic spline basis has at least 4 functions");
  const Index interior = count - order;
  std::vector<double> knots;
  for (Index i = 0; i < order; ++i) knots.push_back(0.0);
  for (Index i = 1; i <= interior; ++i)
    knots.push_back(static_cast<double>(i) / static_cast<double>(interior + 1));
  for (Index i = 0; i < order; ++i) knots.push_back(1.0);

  const Index p = grid.size();
  MatrixXd values = MatrixXd::Zero(p, count);
  const auto nk = static_cast<Index>(knots.size());
  for (Index k = 0; k < p; ++k) {
    const double t = grid.points()[k];
    // Order-1 indicators on half-open spans; the last nonempty span is closed.
    std::vector<double> basis(static_cast<std::size_t>(nk - 1), 0.0);
    for (Index i = 0; i + 1 < nk; ++i) {
      const double lo = knots[static_cast<std::size_t>(i)];
      const double hi = knots[static_cast<std::size_t>(i + 1)];
      if (lo < hi && ((t >= lo && t < hi) || (t == 1.0 && hi == 1.0))) {
        basis[static_cast<std::size_t>(i)] = 1.0;
        break;
      }
    }
    for (Index d = 1; d < order; ++d) {
      for (Index i = 0; i + d + 1 < nk; ++i) {
        const double a0 = knots[static_cast<std::size_t>(i)];
        const double a1 = knots[static_cast<std::size_t>(i + d)];
        const double b0 = knots[static_cast<std::size_t>(i + 1)];
        const double b1 = knots[static_cast<std::size_t>(i + d + 1)];
        double v = 0.0;
        if (a1 > a0) v += (t - a0) / (a1 - a0) * basis[static_cast<std::size_t>(i)];
        if (b1 > b0) v += (b1 - t) / (b1 - b0) * basis[static_cast<std::size_t>(i + 1)];
        basis[static_cast<std::size_t>(i)] = v;
      }
    }
    for (Index j = 0; j < count; ++j) values(k, j) = basis[static_cast<std::size_t>(j)];
  }
  return values;
}

MatrixXd basis_generators(BasisKind kind, Index J, const Grid& grid) {
  if (J < 1) throw Error(Errc::invalid_argument, "basis size must be positive");
  const Index p = grid.size();
  const VectorXd& t = grid.points();
  MatrixXd f(p, J);
  switch (kind) {
    case BasisKind::tri:
      for (Index j = 0; j < J; ++j) {
        const Index m = (j + 1) / 2;  // j = 2m - 1 (sin) or 2m (cos), zero-based
        for (Index k = 0; k < p; ++k) {
          const double arg = 2.0 * static_cast<double>(m) * std::numbers::pi * t[k];
          f(k, j) = j == 0 ? 1.0
                   : (j % 2 == 1 ? std::numbers::sqrt2 * std::sin(arg)
                                 : std::numbers::sqrt2 * std::cos(arg));
        }
      }
      break;
    case BasisKind::mono:
      // t * T_{j-1}(2t - 1) spans the same nested spaces as t^j with a
      // positive leading coefficient, so Gram-Schmidt yields the same
      // orthonormal system without the conditioning loss of raw powers.
      for (Index j = 0; j < J; ++j)
        for (Index k = 0; k < p; ++k) f(k, j) = t[k] * chebyshev(j, 2.0 * t[k] - 1.0);
      break;
    case BasisKind::cheb:
      for (Index j = 0; j < J; ++j)
        for (Index k = 0; k < p; ++k) f(k, j) = chebyshev(j + 1, 2.0 * t[k] - 1.0);
      break;
    case BasisKind::spl:
      f = cubic_bspline_basis(std::max<Index>(J, 4), grid).leftCols(J);
      break;
  }
  return f;
}

BasisSystem basis_system(BasisKind kind, Index J, const GridPtr& grid) {
  const MatrixXd raw = basis_generators(kind, J, *grid);
  return BasisSystem{kind, grid, kind == BasisKind::tri ? raw : gram_schmidt(*grid, raw)};
}

MatrixXd draw_scores(ScoreKind kind, Index n, Index J, RngStream& rng) {
  MatrixXd scores(n, J);
  for (Index i = 0; i < n; ++i) {
    double latent = 1.0;
    if (kind == ScoreKind::NN) latent = rng.normal();
    if (kind == ScoreKind::NE) latent = rng.exponential() - 1.0;
    for (Index j = 0; j < J; ++j) scores(i, j) = latent * rng.normal();
  }
  return scores;
}

FunctionalSample kl_expand(const Curve& mu, std::span<const double> eigenvalues,
                           const BasisSystem& basis, const MatrixXd& scores) {
  require_compatible(*mu.grid, *basis.grid);
  const auto J = static_cast<Index>(eigenvalues.size());
  if (basis.functions.cols() < J || scores.cols() != J)
    throw Error(Errc::invalid_argument, "basis and scores must cover every eigenvalue");
  VectorXd root(J);
  for (Index j = 0; j < J; ++j) root[j] = std::sqrt(eigenvalues[static_cast<std::size_t>(j)]);
  MatrixXd values = basis.functions.leftCols(J) * root.asDiagonal() * scores.transpose();
  values.colwise() += mu.values;
  return FunctionalSample(mu.grid, std::move(values));
}

FunctionalSample kl_sample(const Curve& mu, const EigenProfile& profile, const BasisSystem& basis,
                           ScoreKind score, Index n, RngStream& rng) {
  const MatrixXd scores = draw_scores(score, n, profile.J_true, rng);
  return kl_expand(mu, profile.eigenvalues, basis, scores);
}

Curve shape_template(ShapeKind shape, const GridPtr& grid) {
  const VectorXd& t = grid->points();
  VectorXd v(t.size());
  for (Index k = 0; k < t.size(); ++k) {
    const double x = t[k];
    switch (shape) {
      case ShapeKind::Mag: v[k] = 1.0; break;
      case ShapeKind::Jump: v[k] = x <= 0.2 ? -1.0 : 1.0; break;
      case ShapeKind::Peak: v[k] = (x > 0.2 && x <= 0.4) ? -1.0 : 1.0; break;
      case ShapeKind::Lin: v[k] = 2.0 * x - 1.0; break;
      case ShapeKind::Quad: v[k] = 8.0 * (x - 0.5) * (x - 0.5) - 1.0; break;
      case ShapeKind::Cub: v[k] = 12.0 * std::sqrt(3.0) * x * (x - 0.5) * (x - 1.0); break;
      case ShapeKind::Wig: v[k] = std::sin(10.0 * std::numbers::pi * (x - 0.05)); break;
    }
  }
  return Curve(grid, std::move(v));
}

Curve alternative_mean(ShapeKind shape, double c, const GridPtr& grid) {
  if (c == 0.0) return Curve(grid, VectorXd::Zero(grid->size()));
  Curve mu = shape_template(shape, grid);
  mu.values *= c;
  return mu;
}

TwoSampleData make_two_sample_scenario(const TwoSampleScenario& s, const GridPtr& grid,
                                       RngStream rng) {
  if (s.n < 4) throw Error(Errc::invalid_argument, "two-sample scenarios need n >= 4");
  const Index n1 = s.n / 2;
  const Index n2 = s.n - n1;
  const BasisSystem basis1 = basis_system(s.basis1, s.J_true, grid);
  const BasisSystem basis2 = s.basis2 == s.basis1 ? basis1 : basis_system(s.basis2, s.J_true, grid);
  const EigenProfile profile1 = EigenProfile::from_decay(s.a1, s.J_true);
  const EigenProfile profile2 = EigenProfile::from_decay(s.a2, s.J_true);

  RngStream stream1 = rng.child(stream_tag::group, 1);
  RngStream stream2 = rng.child(stream_tag::group, 2);
  const Curve zero(grid, VectorXd::Zero(grid->size()));
  return TwoSampleData(kl_sample(zero, profile1, basis1, s.scores, n1, stream1),
                       kl_sample(alternative_mean(s.shape, s.c, grid), profile2, basis2, s.scores,
                                 n2, stream2));
}

SlopeOperator make_slope(const FoFRScenario& s, const BasisSystem& mono, const BasisSystem& tri,
                         RngStream& rng) {
  const Index top = 2 * s.J0;
  if (mono.functions.cols() < top || tri.functions.cols() < top)
    throw Error(Errc::invalid_argument, "slope needs 2*J0 basis functions");
  SlopeOperator slope;
  slope.signs.resize(static_cast<std::size_t>(top));
  for (auto& w : slope.signs) w = rng.sign();

  const Index p = mono.grid->size();
  VectorXd mono_coef = VectorXd::Zero(top);
  VectorXd tri_coef(top);
  for (Index j = 1; j <= top; ++j) {
    const double base = 2.0 * std::pow(static_cast<double>(j), -s.b) *
                        slope.signs[static_cast<std::size_t>(j - 1)];
    if (j > s.J0) mono_coef[j - 1] = (1.0 - s.c) * base;
    tri_coef[j - 1] = s.c * base;
  }
  const auto& w = mono.grid->weights();
  const MatrixXd phi = mono.functions.leftCols(top);
  const MatrixXd psi = tri.functions.leftCols(top);
  slope.matrix = phi * mono_coef.asDiagonal() * phi.transpose() * w.asDiagonal() +
                 psi * tri_coef.asDiagonal() * psi.transpose() * w.asDiagonal();
  (void)p;
  return slope;
}

FoFRData make_fofr_scenario(const FoFRScenario& s, const GridPtr& grid, RngStream rng) {
  const BasisSystem mono = basis_system(BasisKind::mono, s.J_true, grid);
  const BasisSystem cheb = basis_system(BasisKind::cheb, s.J_true, grid);
  const BasisSystem tri = basis_system(BasisKind::tri, std::max(s.J_true, 2 * s.J0), grid);
  const EigenProfile x_profile = EigenProfile::from_decay(s.aX, s.J_true);
  const EigenProfile e_profile = EigenProfile::from_decay(s.aE, s.J_true);
  const Curve zero(grid, VectorXd::Zero(grid->size()));

  RngStream x_stream = rng.child(stream_tag::data, 1);
  RngStream e_stream = rng.child(stream_tag::data, 2);
  RngStream x0_stream = rng.child(stream_tag::data, 3);
  RngStream slope_stream = rng.child(stream_tag::slope);

  const FunctionalSample X = kl_sample(zero, x_profile, mono, s.scores, s.n, x_stream);
  const FunctionalSample E = kl_sample(zero, e_profile, cheb, s.scores, s.n, e_stream);
  const SlopeOperator slope = make_slope(s, mono, tri, slope_stream);
  MatrixXd Y = slope.matrix * X.values() + s.noise_scale * E.values();

  const MatrixXd x0_scores = draw_scores(s.scores, 1, s.J0, x0_stream);
  const std::vector<double> head(x_profile.eigenvalues.begin(),
                                 x_profile.eigenvalues.begin() + s.J0);
  const FunctionalSample x0 = kl_expand(zero, head, mono, x0_scores);

  return FoFRData(X, FunctionalSample(grid, std::move(Y)), x0.curve(0));
}

}  // namespace fdstat
