#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fdstat/depth.hpp"

using namespace fdstat;

namespace {

FunctionalSample constants(const GridPtr& g, std::vector<double> levels) {
  MatrixXd v(g->size(), static_cast<Index>(levels.size()));
  for (std::size_t i = 0; i < levels.size(); ++i) v.col(static_cast<Index>(i)).setConstant(levels[i]);
  return FunctionalSample(g, v);
}

Curve constant(const GridPtr& g, double v) { return Curve(g, VectorXd::Constant(g->size(), v)); }

FunctionalSample random_sample(const GridPtr& g, Index n, RngStream& rng) {
  MatrixXd v(g->size(), n);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
  return FunctionalSample(g, v);
}

}  // namespace

TEST(Quantile, OrderStatisticConvention) {
  EXPECT_EQ(quantile_order_statistic({3, 1, 2, 2, 1, 3}, 0.5), 2);
  EXPECT_EQ(quantile_order_statistic({5, 4}, 1e-9), 4);
  EXPECT_EQ(quantile_order_statistic({5, 4}, 0.999), 5);
  // u*m lands exactly on an integer despite rounding in u.
  EXPECT_EQ(quantile_order_statistic({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.3), 3);
}

TEST(KdBandwidth, Examples) {
  auto g = make_grid(5);
  EXPECT_NEAR(kd_bandwidth(constants(g, {0, 1, 3}), 0.5), 2.0, 1e-14);
  EXPECT_EQ(kd_bandwidth(constants(g, {4, 4}), 0.3), 1.0);
  EXPECT_NEAR(kd_bandwidth(constants(g, {0, 1}), 0.9), 1.0, 1e-14);
}

TEST(KdBandwidth, ZeroQuantileFallsBackToSmallestPositive) {
  auto g = make_grid(5);
  // Ordered distances: 0,0,2,2,2,2 -> index ceil(0.2*6)=2 is 0 -> smallest positive 2.
  EXPECT_NEAR(kd_bandwidth(constants(g, {1, 1, 3}), 0.2), 2.0, 1e-14);
}

TEST(KdBandwidth, NeedsTwoCurves) {
  auto g = make_grid(5);
  try {
    kd_bandwidth(constants(g, {1}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_sample);
  }
}

TEST(KdDepth, Examples) {
  auto g = make_grid(9);
  DepthSpec spec;
  spec.kind = DepthKind::KD;
  EXPECT_NEAR(kd_depth(constant(g, 1.5), constants(g, {1.5, 1.5, 1.5}), spec).value, 1.0, 1e-15);

  spec.bandwidth = 1.0;
  EXPECT_NEAR(kd_depth(constant(g, 0), constants(g, {0, 2}), spec).value, (1 + std::exp(-2.0)) / 2,
              1e-12);
  EXPECT_LT(kd_depth(constant(g, 1e3), constants(g, {0, 2}), spec).value, 1e-300);
}

TEST(KdDepth, LaplaceKernel) {
  EXPECT_NEAR(kernel_value(KernelKind::laplace, 2.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(kernel_value(KernelKind::gaussian, 2.0), std::exp(-2.0), 1e-15);
  EXPECT_EQ(kernel_value(KernelKind::gaussian, 0.0), 1.0);
}

TEST(KdDepth, BoundsAndShiftInvariance) {
  auto g = make_grid(20);
  RngStream rng(21);
  DepthSpec spec;
  spec.quantile_u = 0.2;
  for (int rep = 0; rep < 20; ++rep) {
    const FunctionalSample ens = random_sample(g, 15, rng);
    VectorXd x(20), c(20);
    for (Index k = 0; k < 20; ++k) {
      x[k] = rng.normal();
      c[k] = 3 * rng.normal();
    }
    const double h = kd_bandwidth(ens, spec.quantile_u);
    const double d = kd_depth(Curve(g, x), ens, spec).value;
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 1.0 / h);
    const FunctionalSample shifted(g, MatrixXd(ens.values().colwise() + c));
    EXPECT_NEAR(kd_depth(Curve(g, x + c), shifted, spec).value, d, 1e-12 * d);
  }
}

TEST(KdDepth, ShiftInvarianceBitExactOnDyadicData) {
  auto g = make_grid(17);
  RngStream rng(22);
  DepthSpec spec;
  spec.quantile_u = 0.3;
  MatrixXd v(17, 9);
  VectorXd x(17), c(17);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = static_cast<double>(rng.index(64)) / 8.0;
  for (Index k = 0; k < 17; ++k) {
    x[k] = static_cast<double>(rng.index(64)) / 8.0;
    c[k] = static_cast<double>(rng.index(64)) / 4.0;
  }
  const FunctionalSample ens(g, v);
  const FunctionalSample shifted(g, MatrixXd(v.colwise() + c));
  EXPECT_EQ(kd_depth(Curve(g, x + c), shifted, spec).value, kd_depth(Curve(g, x), ens, spec).value);
}

TEST(KdOracle, Examples) {
  auto g = make_grid(50);
  const std::vector<Curve> psi = {constant(g, 1)};
  const std::vector<double> zero = {0.0}, one = {1.0};
  EXPECT_NEAR(kd_gaussian_oracle(constant(g, 0), zero, psi), 1.0, 1e-15);
  EXPECT_NEAR(kd_gaussian_oracle(constant(g, 0), one, psi), 0.70711, 1e-5);
  EXPECT_NEAR(kd_gaussian_oracle(constant(g, 1), one, psi), 0.55069, 1e-5);
}

TEST(KdOracle, ResidualOutsideSpanHasUnitDenominator) {
  auto g = make_grid(50);
  const std::vector<Curve> psi = {constant(g, 1)};
  const std::vector<double> one = {1.0};
  VectorXd x(50);
  for (Index k = 0; k < 50; ++k) x[k] = k < 25 ? 1.0 : -1.0;
  const double r2 = inner_product(*g, x, x) - std::pow(inner_product(*g, x, VectorXd::Ones(50)), 2);
  const double a = inner_product(*g, x, VectorXd::Ones(50));
  EXPECT_NEAR(kd_gaussian_oracle(Curve(g, x), one, psi),
              std::pow(2.0, -0.5) * std::exp(-0.5 * (a * a / 2 + r2)), 1e-14);
}

TEST(KdOracle, NonOrthonormalBasis) {
  auto g = make_grid(10);
  const std::vector<Curve> psi = {constant(g, 2)};
  const std::vector<double> one = {1.0};
  try {
    kd_gaussian_oracle(constant(g, 0), one, psi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_basis);
  }
}

TEST(RhdDirections, RankOneEnsembleRetainsConstantComponent) {
  auto g = make_grid(10);
  const FunctionalSample ens = constants(g, {-2, -1, 1, 2});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(seed);
    const RhdDirections pool = rhd_directions(ens, 100, 0.1, rng);
    EXPECT_EQ(pool.directions.cols(), 100);
    for (Index m = 0; m < 100; ++m) {
      const VectorXd v = pool.directions.col(m);
      EXPECT_NEAR(norm(*g, v), 1.0, 1e-12);
      // Dispersion = sqrt(2.5) |<1, v>|.
      EXPECT_NEAR(pool.dispersion[m], std::sqrt(2.5) * std::abs(inner_product(*g, v, VectorXd::Ones(10))),
                  1e-12);
    }
    for (Index m : pool.retained)
      EXPECT_GT(std::abs(inner_product(*g, VectorXd(pool.directions.col(m)), VectorXd::Ones(10))), 0.0);
  }
}

TEST(RhdDirections, SmallUKeepsAllAndSingleDirectionKept) {
  auto g = make_grid(12);
  RngStream data(1);
  const FunctionalSample ens = random_sample(g, 8, data);
  RngStream rng(2);
  EXPECT_EQ(rhd_directions(ens, 50, 1e-6, rng).retained.size(), 50u);
  RngStream rng1(3);
  EXPECT_EQ(rhd_directions(ens, 1, 0.5, rng1).retained.size(), 1u);
  RngStream rng2(4);
  // u close to 1: lambda is the largest dispersion, still one direction left.
  EXPECT_GE(rhd_directions(ens, 20, 0.999, rng2).retained.size(), 1u);
}

TEST(RhdDepth, HandEnumerationForEverySeed) {
  auto g = make_grid(10);
  const FunctionalSample ens = constants(g, {-2, -1, 1, 2});
  DepthSpec spec;
  spec.kind = DepthKind::RHD;
  spec.quantile_u = 0.1;
  spec.projections = 200;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream r0(seed), r1(seed), r2(seed);
    EXPECT_EQ(rhd_depth(constant(g, 0), ens, spec, r0).value, 0.5);
    EXPECT_EQ(rhd_depth(constant(g, 3), ens, spec, r1).value, 0.0);
    EXPECT_EQ(rhd_depth(constant(g, -2), ens, spec, r2).value, 0.25);
  }
}

TEST(RhdDepth, BoundsMembersAndRetentionMonotonicity) {
  auto g = make_grid(15);
  RngStream data(9);
  for (int rep = 0; rep < 10; ++rep) {
    const FunctionalSample ens = random_sample(g, 12, data);
    RngStream a(100 + rep), b(100 + rep);
    const RhdDirections coarse = rhd_directions(ens, 80, 0.5, a);
    const RhdDirections fine = rhd_directions(ens, 80, 0.05, b);
    ASSERT_EQ(coarse.directions, fine.directions);
    for (Index i = 0; i < ens.size(); ++i) {
      const Curve x = ens.curve(i);
      const double d = rhd_depth(x, ens, coarse).value;
      EXPECT_GE(d, 1.0 / 12 - 1e-15);
      EXPECT_LE(d, 1.0);
      EXPECT_LE(rhd_depth(x, ens, fine).value, d);
    }
    VectorXd far = VectorXd::Constant(15, 100.0);
    EXPECT_EQ(rhd_depth(Curve(g, far), ens, coarse).value, 0.0);
  }
}

TEST(RhdDepth, TiebreakKeyIsOutlyingness) {
  auto g = make_grid(10);
  const FunctionalSample ens = constants(g, {-2, -1, 1, 2});
  DepthSpec spec;
  spec.kind = DepthKind::RHD;
  spec.quantile_u = 0.1;
  spec.projections = 50;
  RngStream r0(1), r1(1);
  const DepthValue near = rhd_depth(constant(g, 3), ens, spec, r0);
  const DepthValue far = rhd_depth(constant(g, 10), ens, spec, r1);
  ASSERT_TRUE(near.tiebreak_key && far.tiebreak_key);
  EXPECT_EQ(near.value, far.value);
  EXPECT_GT(*far.tiebreak_key, *near.tiebreak_key);
  // Projections onto a direction with constant component a: {-2a,-a,a,2a},
  // median 0, MAD 1.5|a|, so the outlyingness of constant 3 is 3|a| / 1.5|a| = 2.
  EXPECT_NEAR(*near.tiebreak_key, 2.0, 1e-10);
}

TEST(Univariate, Examples) {
  const std::vector<double> s = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(univariate_halfspace(3, s), 0.6);
  EXPECT_DOUBLE_EQ(univariate_halfspace(0, s), 0.0);
  EXPECT_DOUBLE_EQ(univariate_halfspace(5, s), 0.2);
  try {
    univariate_halfspace(1, std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_sample);
  }
}

TEST(Pointwise, Examples) {
  auto g = make_grid(6);
  EXPECT_DOUBLE_EQ(itd_depth(constant(g, 0), constants(g, {0, 1})).value, 0.5);
  EXPECT_DOUBLE_EQ(ifd_depth(constant(g, 0), constants(g, {0, 1})).value, 0.5);
  EXPECT_EQ(itd_depth(constant(g, -1), constants(g, {0, 1})).value, 0.0);
  EXPECT_EQ(ifd_depth(constant(g, -1), constants(g, {0, 1})).value, 0.0);
  EXPECT_DOUBLE_EQ(itd_depth(constant(g, 2), constants(g, {2})).value, 1.0);
  EXPECT_EQ(ifd_depth(constant(g, 2), constants(g, {2})).value, 1.0);

  const FunctionalSample ens = constants(g, {0, 1, 2});
  VectorXd dip = VectorXd::Constant(6, 1.0);
  dip[3] = -5;
  EXPECT_EQ(ifd_depth(Curve(g, dip), ens).value, 0.0);
  EXPECT_GT(itd_depth(Curve(g, dip), ens).value, 0.0);
}

TEST(Pointwise, BruteForceOracleAndOrdering) {
  RngStream rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 2 + static_cast<Index>(rng.index(11));
    const Index n = 1 + static_cast<Index>(rng.index(6));
    auto g = make_grid(p);
    MatrixXd v(p, n);
    // Small integer values make ties frequent.
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = static_cast<double>(rng.index(4));
    VectorXd x(p);
    for (Index k = 0; k < p; ++k) x[k] = static_cast<double>(rng.index(5)) - 0.5 * rng.index(2);
    const FunctionalSample ens(g, v);

    double itd = 0.0, ifd = 1.0;
    for (Index k = 0; k < p; ++k) {
      Index le = 0, ge = 0;
      for (Index i = 0; i < n; ++i) {
        le += v(k, i) <= x[k];
        ge += v(k, i) >= x[k];
      }
      const double d = static_cast<double>(std::min(le, ge)) / static_cast<double>(n);
      itd += g->weights()[k] * d;
      ifd = std::min(ifd, d);
    }
    EXPECT_EQ(itd_depth(Curve(g, x), ens).value, itd);
    EXPECT_EQ(ifd_depth(Curve(g, x), ens).value, ifd);
    EXPECT_LE(ifd, itd + 1e-15);
  }
}

TEST(DepthFunction, MatchesFreeFunctions) {
  auto g = make_grid(12);
  RngStream data(5);
  const FunctionalSample ens = random_sample(g, 10, data);
  for (auto kind : {DepthKind::KD, DepthKind::ITD, DepthKind::IFD, DepthKind::RHD}) {
    DepthSpec spec;
    spec.kind = kind;
    spec.quantile_u = 0.1;
    spec.projections = 40;
    const auto f = make_depth_function(spec, ens, RngStream(8));
    RngStream rng(8);
    for (Index i = 0; i < ens.size(); ++i) {
      const Curve x = ens.curve(i);
      double expect = 0;
      switch (kind) {
        case DepthKind::KD: expect = kd_depth(x, ens, spec).value; break;
        case DepthKind::ITD: expect = itd_depth(x, ens).value; break;
        case DepthKind::IFD: expect = ifd_depth(x, ens).value; break;
        case DepthKind::RHD: {
          RngStream r(8);
          expect = rhd_depth(x, ens, spec, r).value;
          break;
        }
      }
      EXPECT_NEAR(f->evaluate_member(i).value, expect, 1e-14) << to_string(kind);
    }
  }
}

TEST(DepthSpec, Validation) {
  DepthSpec spec;
  spec.quantile_u = 0;
  EXPECT_THROW(spec.validate(), Error);
  spec.quantile_u = 0.5;
  spec.projections = 0;
  EXPECT_THROW(spec.validate(), Error);
  EXPECT_EQ(parse_depth_kind("RHD"), DepthKind::RHD);
  EXPECT_THROW(parse_depth_kind("XYZ"), Error);
}
