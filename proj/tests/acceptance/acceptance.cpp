// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fdstat/cli.hpp"
#include "fdstat/parallel.hpp"

using namespace fdstat;

namespace {

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

bool all_passed = true;

void verdict(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s  %s  (%.1fs)\n", id, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  all_passed = all_passed && ok;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rate_of(const std::vector<PowerRow>& rows, const std::string& method, double c) {
  for (const auto& r : rows)
    if (r.method == method && r.c == c) return r.rate;
  throw Error(Errc::invalid_argument, "missing power row " + method);
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

// Shared two-sample study for criteria 1-3: n=50, NN scores, equal
// covariance, 200 replicates, B=200, cubic alternative at c=1.
std::vector<PowerRow> two_sample_study() {
  TwoSampleScenario s;
  s.shape = ShapeKind::Cub;
  s.n = 50;
  s.scores = ScoreKind::NN;
  TwoSampleOptions o;
  o.B = 200;
  PowerOptions po;
  po.replicates = 200;
  po.workers = workers();
  const std::vector<double> scales = {0.0, 1.0};
  const auto methods = parse_two_sample_methods("ITD,IFD,RHD,KD,L2,SUP");
  return two_sample_power(s, scales, methods, o, po, make_grid(50), RngStream(20240601));
}

void criteria_1_to_3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = two_sample_study();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double kd0 = rate_of(rows, "KD", 0.0);
  verdict(1, within(kd0, 0.01, 0.12), "two-sample KD null size " + fmt("%.3f", kd0) + " in [0.01, 0.12]",
          secs);

  bool ok2 = true;
  std::string d2;
  for (const char* m : {"ITD", "IFD", "RHD", "L2", "SUP"}) {
    const double r = rate_of(rows, m, 0.0);
    ok2 = ok2 && within(r, 0.005, 0.13);
    d2 += std::string(m) + "=" + fmt("%.3f", r) + " ";
  }
  verdict(2, ok2, "null sizes " + d2 + "each in [0.005, 0.13]", 0.0);

  const double kd = rate_of(rows, "KD", 1.0), sup = rate_of(rows, "SUP", 1.0),
               l2 = rate_of(rows, "L2", 1.0);
  verdict(3, kd >= sup + 0.10 && kd >= l2,
          "cubic c=1 power KD=" + fmt("%.3f", kd) + " SUP=" + fmt("%.3f", sup) + " L2=" +
              fmt("%.3f", l2) + "; need KD >= SUP+0.10 and KD >= L2",
          0.0);
}

double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - p[i]);
    d = std::max(d, p[i] - static_cast<double>(i) / n);
  }
  return d;
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const Index B = 500, reps = 500;
  const GridPtr g = make_grid(30);
  const BasisSystem basis = basis_system(BasisKind::tri, 20, g);
  const EigenProfile profile = EigenProfile::from_decay(2.5, 20);
  const Curve zero(g, VectorXd::Zero(30));

  struct Case {
    DepthKind kind;
    double u;
    bool required;
  };
  const std::vector<Case> cases = {
      {DepthKind::KD, 0.01, true}, {DepthKind::RHD, 0.1, true}, {DepthKind::ITD, 0.01, true},
      {DepthKind::IFD, 0.01, false}};
  std::vector<std::vector<double>> pvalues(cases.size(), std::vector<double>(reps));
  const RngStream master(4242);
  parallel_for(static_cast<std::size_t>(reps), workers(), [&](std::size_t r) {
    RngStream data = master.child(stream_tag::replicate, r).child(stream_tag::data);
    // Observed statistic and ensemble come from one exchangeable draw.
    const FunctionalSample all = kl_sample(zero, profile, basis, ScoreKind::NN, B + 1, data);
    const BootstrapEnsemble ens{FunctionalSample(g, MatrixXd(all.values().leftCols(B))), "iid"};
    const Curve observed = all.curve(B);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      DepthSpec spec;
      spec.kind = cases[c].kind;
      spec.quantile_u = cases[c].u;
      spec.projections = 500;
      pvalues[c][r] =
          depth_pvalue(observed, ens, spec, master.child(stream_tag::replicate, r).child(stream_tag::test))
              .pvalue;
    }
  });
  bool ok = true;
  std::string detail;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const double ks = ks_uniform(pvalues[c]);
    if (cases[c].required) ok = ok && ks < 0.10;
    detail += to_string(cases[c].kind) + "=" + fmt("%.3f", ks) + (cases[c].required ? " " : " (informational) ");
  }
  verdict(4, ok, "KS distance to U(0,1) " + detail + "; need < 0.10",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(5);
  int mismatches = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 2 + static_cast<Index>(rng.index(11));
    const Index n = 1 + static_cast<Index>(rng.index(6));
    const GridPtr g = make_grid(p);
    MatrixXd v(p, n);
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = static_cast<double>(rng.index(4));
    VectorXd x(p);
    for (Index k = 0; k < p; ++k) x[k] = static_cast<double>(rng.index(5)) - 0.5 * static_cast<double>(rng.index(2));
    const FunctionalSample ens(g, v);
    // Pointwise halfspace depth by direct counting.
    double integral = 0.0, infimum = 1.0;
    for (Index k = 0; k < p; ++k) {
      Index le = 0, ge = 0;
      for (Index i = 0; i < n; ++i) {
        le += v(k, i) <= x[k];
        ge += v(k, i) >= x[k];
      }
      const double d = static_cast<double>(std::min(le, ge)) / static_cast<double>(n);
      integral += g->weights()[k] * d;
      infimum = std::min(infimum, d);
    }
    const Curve xc(g, x);
    mismatches += itd_depth(xc, ens).value != integral;
    mismatches += ifd_depth(xc, ens).value != infimum;
  }

  const GridPtr g = make_grid(10);
  MatrixXd consts(10, 4);
  for (Index i = 0; i < 4; ++i) consts.col(i).setConstant(std::vector<double>{-2, -1, 1, 2}[static_cast<std::size_t>(i)]);
  const FunctionalSample ens(g, consts);
  DepthSpec spec;
  spec.kind = DepthKind::RHD;
  spec.quantile_u = 0.1;
  spec.projections = 200;
  int rhd_bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::pair<double, double> cases[] = {{0.0, 0.5}, {3.0, 0.0}, {-2.0, 0.25}};
    for (const auto& [level, expect] : cases) {
      RngStream r(seed);
      rhd_bad += rhd_depth(Curve(g, VectorXd::Constant(10, level)), ens, spec, r).value != expect;
    }
  }
  verdict(5, mismatches == 0 && rhd_bad == 0,
          "ITD/IFD brute-force mismatches " + std::to_string(mismatches) +
              "/100, RHD constant-ensemble mismatches " + std::to_string(rhd_bad) + "/60",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridPtr g = make_grid(50);
  const BasisSystem basis = basis_system(BasisKind::tri, 3, g);
  const std::vector<double> sigma = {1.0, 0.5, 0.25};
  RngStream rng(6);
  const Curve zero(g, VectorXd::Zero(50));
  const MatrixXd scores = draw_scores(ScoreKind::N1, 5000, 3, rng);
  const FunctionalSample ens = kl_expand(zero, sigma, basis, scores);
  std::vector<Curve> psi;
  for (Index j = 0; j < 3; ++j) psi.push_back(basis.function(j));

  DepthSpec spec;
  spec.kind = DepthKind::KD;
  spec.bandwidth = 1.0;
  double worst = 0.0;
  for (int q = 0; q < 10; ++q) {
    VectorXd x = VectorXd::Zero(50);
    for (Index j = 0; j < 3; ++j) x += (0.3 * q - 1.0 + rng.normal()) * std::sqrt(sigma[static_cast<std::size_t>(j)]) * basis.functions.col(j);
    // A component outside the eigenfunction span.
    for (Index k = 0; k < 50; ++k) x[k] += 0.2 * std::sin(6.0 * g->points()[k]) * (q % 3);
    const Curve xc(g, x);
    worst = std::max(worst, std::abs(kd_depth(xc, ens, spec).value - kd_gaussian_oracle(xc, sigma, psi)));
  }
  verdict(6, worst <= 0.02, "KD (h=1) vs Gaussian closed form, max abs error " + fmt("%.4f", worst) + " <= 0.02",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  FoFRScenario s;
  s.n = 50;
  s.aX = s.aE = 2.5;
  s.b = 1.5;
  s.scores = ScoreKind::NN;
  FoFROptions o;
  o.B = 200;
  PowerOptions po;
  po.replicates = 200;
  po.workers = workers();
  const std::vector<double> scales = {0.0, 1.0};
  const auto methods = parse_fofr_methods("RHD,KD,L2,SUP");
  const auto rows = fofr_power(s, scales, methods, o, po, make_grid(50), RngStream(20240602));

  bool ok = true;
  std::string null_detail;
  for (const char* m : {"RHD", "KD", "L2", "SUP"}) {
    const double r = rate_of(rows, m, 0.0);
    ok = ok && within(r, 0.01, 0.12);
    null_detail += std::string(m) + "=" + fmt("%.3f", r) + " ";
  }
  const double rhd = rate_of(rows, "RHD", 1.0), kd = rate_of(rows, "KD", 1.0),
               sup = rate_of(rows, "SUP", 1.0);
  ok = ok && rhd >= sup && kd >= sup;
  verdict(7, ok,
          "regression null " + null_detail + "in [0.01, 0.12]; c=1 RHD=" + fmt("%.3f", rhd) +
              " KD=" + fmt("%.3f", kd) + " SUP=" + fmt("%.3f", sup) + ", need RHD,KD >= SUP",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(8);

  // Gram-Schmidt on random and on badly scaled polynomial inputs.
  double gs = 0.0;
  const GridPtr g = make_grid(50);
  MatrixXd raw(50, 20);
  for (Index i = 0; i < raw.size(); ++i) raw.data()[i] = rng.normal();
  for (const MatrixXd& in : {raw, basis_generators(BasisKind::cheb, 20, *g), basis_generators(BasisKind::spl, 20, *g)}) {
    const MatrixXd q = gram_schmidt(*g, in);
    const MatrixXd m = q.transpose() * g->weights().asDiagonal() * q;
    gs = std::max(gs, (m - MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff());
  }

  // Covariance reconstruction against the empirical kernel.
  const FunctionalSample x = kl_sample(Curve(g, VectorXd::Zero(50)), EigenProfile::from_decay(2.5, 20),
                                       basis_system(BasisKind::mono, 20, g), ScoreKind::NE, 80, rng);
  const Curve mean = sample_mean(x);
  const MatrixXd centered = x.values().colwise() - mean.values;
  const MatrixXd kernel = centered * centered.transpose() / 80.0;
  const double cov = (covariance_eig(x, mean).reconstruct() - kernel).cwiseAbs().maxCoeff();

  // Regression statistic under radial scaling of x0 - Xbar.
  FoFRScenario fs;
  fs.c = 0.7;
  const FoFRData d = make_fofr_scenario(fs, g, RngStream(81));
  const FPCRFit fit = fpcr_fit(d.X, d.Y, 5, 3, 3);
  const Curve base = fofr_statistic(d, fit);
  double radial = 0.0;
  for (double c : {0.25, 2.0, 7.5}) {
    const FoFRData moved(d.X, d.Y, Curve(g, VectorXd(fit.xbar + c * (d.x0.values - fit.xbar))));
    radial = std::max(radial, (fofr_statistic(moved, fit).values - base.values).cwiseAbs().maxCoeff());
  }

  // Two-sample shift on dyadic data: every report field identical.
  const GridPtr g9 = make_grid(9);
  MatrixXd a(9, 8), b(9, 8);
  for (Index i = 0; i < a.size(); ++i) {
    a.data()[i] = static_cast<double>(rng.index(32)) / 4.0 - 4.0;
    b.data()[i] = static_cast<double>(rng.index(32)) / 4.0 - 4.0;
  }
  VectorXd shift(9);
  for (Index k = 0; k < 9; ++k) shift[k] = static_cast<double>(rng.index(16)) / 2.0 - 3.0;
  TwoSampleOptions o;
  o.B = 100;
  o.projections = 100;
  const auto methods = parse_two_sample_methods("ITD,IFD,RHD,KD,L2,SUP,FINT,FMAX");
  const auto r1 = two_sample_tests(TwoSampleData(FunctionalSample(g9, a), FunctionalSample(g9, b)),
                                   methods, o, RngStream(88));
  const auto r2 = two_sample_tests(
      TwoSampleData(FunctionalSample(g9, MatrixXd(a.colwise() + shift)),
                    FunctionalSample(g9, MatrixXd(b.colwise() + shift))),
      methods, o, RngStream(88));
  bool exact = true;
  for (std::size_t m = 0; m < r1.size(); ++m)
    exact = exact && r1[m].pvalue == r2[m].pvalue && r1[m].observed_depth == r2[m].observed_depth &&
            r1[m].observed_scalar == r2[m].observed_scalar;

  verdict(8, gs <= 1e-10 && cov <= 1e-8 && radial <= 1e-10 && exact,
          "Gram-Schmidt " + fmt("%.1e", gs) + " <= 1e-10, covariance " + fmt("%.1e", cov) +
              " <= 1e-8, radial scaling " + fmt("%.1e", radial) + " <= 1e-10, shift " +
              (exact ? "bit-exact" : "NOT bit-exact"),
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

void criterion_9() {
  using namespace fdstat::cli;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string dir = "acceptance_cli";
  std::filesystem::create_directories(dir);

  auto capture = [](int (*cmd)(const RunConfig&, std::ostream&), RunConfig c, int w) {
    c.workers = w;
    std::ostringstream out;
    cmd(c, out);
    return out.str();
  };
  int differing = 0, checked = 0;
  auto compare = [&](int (*cmd)(const RunConfig&, std::ostream&), const RunConfig& c) {
    ++checked;
    differing += capture(cmd, c, 1) != capture(cmd, c, 8);
  };

  RunConfig gen;
  gen.command = "gen";
  gen.c = 0.6;
  gen.seed = 9;
  compare(cmd_gen, gen);
  gen.out = dir + "/two.csv";
  capture(cmd_gen, gen, 1);
  RunConfig reg = gen;
  reg.scenario = "fofr";
  reg.out = dir + "/reg";
  capture(cmd_gen, reg, 1);

  RunConfig depth;
  depth.command = "depth";
  depth.method = "RHD";
  depth.data = gen.out;
  compare(cmd_depth, depth);

  RunConfig two;
  two.command = "two-sample";
  two.data = gen.out;
  two.B = 200;
  two.seed = 9;
  compare(cmd_two_sample, two);

  RunConfig fofr;
  fofr.command = "fofr";
  fofr.x = reg.out + "_X.csv";
  fofr.y = reg.out + "_Y.csv";
  fofr.x0 = reg.out + "_x0.csv";
  fofr.B = 200;
  fofr.seed = 9;
  compare(cmd_fofr, fofr);

  RunConfig power;
  power.command = "power";
  power.reps = 10;
  power.B = 50;
  power.scales = {0.0, 1.0};
  compare(cmd_power, power);
  power.scenario = "fofr";
  power.method = "KD,SUP";
  compare(cmd_power, power);

  std::filesystem::remove_all(dir);
  verdict(9, differing == 0,
          std::to_string(checked - differing) + "/" + std::to_string(checked) +
              " command reports byte-identical for 1 vs 8 workers",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps = {criteria_1_to_3, criterion_4, criterion_5,
                                                    criterion_6,     criterion_7, criterion_8,
                                                    criterion_9};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("criterion run aborted: %s\n", e.what());
      all_passed = false;
    }
  }
  std::printf("%s\n", all_passed ? "all acceptance criteria passed" : "some acceptance criteria FAILED");
  return all_passed ? 0 : 1;
}
