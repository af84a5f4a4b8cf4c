#pragma once

// Simulation scenarios: Karhunen-Loeve samples over orthonormal systems with
// gap-defined eigenvalues, shape alternatives for two-sample means, and
// regression scenarios with a known slope operator.

#include <string>
#include <vector>

#include "fdstat/fofr.hpp"
#include "fdstat/twosample.hpp"

namespace fdstat {

/// Eigenvalues with gaps gamma_j - gamma_{j+1} = 2 j^-a and
/// gamma_1 = 2 sum_{j>=1} j^-a. Requires a > 2.
std::vector<double> eigenvalues_from_decay(double a, Index J);

struct EigenProfile {
  double decay_a = 2.5;
  Index J_true = 20;
  std::vector<double> eigenvalues;

  static EigenProfile from_decay(double a, Index J_true = 20);
};

enum class BasisKind { tri, mono, cheb, spl };
enum class ScoreKind { N1, NN, NE };
enum class ShapeKind { Mag, Jump, Peak, Lin, Quad, Cub, Wig };

std::string to_string(BasisKind kind);
std::string to_string(ScoreKind kind);
std::string to_string(ShapeKind kind);
BasisKind parse_basis_kind(const std::string& name);
ScoreKind parse_score_kind(const std::string& name);
ShapeKind parse_shape_kind(const std::string& name);

struct BasisSystem {
  BasisKind kind;
  GridPtr grid;
  MatrixXd functions;  ///< p x J, orthonormal in the grid inner product

  Curve function(Index j) const { return Curve(grid, functions.col(j)); }
};

/// Raw (not yet orthonormalized) generators of a basis system, p x J.
MatrixXd basis_generators(BasisKind kind, Index J, const Grid& grid);

BasisSystem basis_system(BasisKind kind, Index J, const GridPtr& grid);

/// Cubic B-spline basis (order 4) with `count` functions: equispaced interior
/// knots on [0,1] and boundary knots of multiplicity 4. Values are p x count.
MatrixXd cubic_bspline_basis(Index count, const Grid& grid);

/// Per-curve scores xi_ij = xi_i W_ij: n x J.
MatrixXd draw_scores(ScoreKind kind, Index n, Index J, RngStream& rng);

/// X_i = mu + sum_j sqrt(gamma_j) scores(i,j) phi_j.
FunctionalSample kl_expand(const Curve& mu, std::span<const double> eigenvalues,
                           const BasisSystem& basis, const MatrixXd& scores);

FunctionalSample kl_sample(const Curve& mu, const EigenProfile& profile, const BasisSystem& basis,
                           ScoreKind score, Index n, RngStream& rng);

/// Shape template mu_{2,d} on the grid (scale 1).
Curve shape_template(ShapeKind shape, const GridPtr& grid);
/// c * mu_{2,d}.
Curve alternative_mean(ShapeKind shape, double c, const GridPtr& grid);

struct TwoSampleScenario {
  ShapeKind shape = ShapeKind::Cub;
  double c = 0.0;
  Index n = 50;  ///< total; each group gets n/2
  ScoreKind scores = ScoreKind::NN;
  double a1 = 2.5;
  double a2 = 2.5;
  BasisKind basis1 = BasisKind::tri;
  BasisKind basis2 = BasisKind::tri;
  Index J_true = 20;
};

/// Group 1 has mean zero; group 2 has mean c * mu_{2,d}. The noise draws
/// depend only on `rng`, not on c.
TwoSampleData make_two_sample_scenario(const TwoSampleScenario& s, const GridPtr& grid,
                                       RngStream rng);

struct FoFRScenario {
  double aX = 2.5;
  double aE = 2.5;
  double b = 1.5;
  double c = 0.0;
  Index n = 50;
  ScoreKind scores = ScoreKind::NN;
  Index J_true = 20;
  Index J0 = 5;
  double noise_scale = 1.0;  ///< 0 removes the error term
};

/// Slope operator matrix S with (B x)(t_k) = (S x)_k on the grid, together
/// with the drawn signs.
struct SlopeOperator {
  MatrixXd matrix;
  std::vector<int> signs;  ///< W_j for j = 1..2 J0

  VectorXd apply(const Eigen::Ref<const VectorXd>& x) const { return matrix * x; }
};

/// B_c = (1-c) sum_{j=J0+1}^{2J0} 2 j^-b W_j phi_mono,j (x) phi_mono,j
///     + c sum_{j=1}^{2J0} 2 j^-b W_j phi_tri,j (x) phi_tri,j
SlopeOperator make_slope(const FoFRScenario& s, const BasisSystem& mono, const BasisSystem& tri,
                         RngStream& rng);

FoFRData make_fofr_scenario(const FoFRScenario& s, const GridPtr& grid, RngStream rng);

}  // namespace fdstat
