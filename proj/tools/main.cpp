#include <CLI11.hpp>
#include <iostream>

#include "fdstat/cli.hpp"

int main(int argc, char** argv) {
  using namespace fdstat::cli;
  RunConfig config;
  std::string u_text;

  CLI::App app{"Depth-based tests for functional data"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  app.add_option("--method", config.method, "Method or comma-separated list of methods");
  app.add_option("--B", config.B, "Bootstrap replicates")->check(CLI::PositiveNumber);
  app.add_option("--reps", config.reps, "Monte Carlo replicates (power)")->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Master seed");
  app.add_option("--u", u_text, "Quantile level for KD bandwidth / RHD regularization");
  app.add_option("--kernel", config.kernel, "KD kernel")->check(CLI::IsMember({"gaussian", "laplace"}));
  app.add_option("--projections", config.projections, "RHD random directions")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid", config.grid, "Grid size for generated data")->check(CLI::Range(2, 100000));
  app.add_option("--out", config.out, "Output path (stdout when omitted; prefix for gen fofr)");
  app.add_option("--svg", config.svg, "Write an SVG plot to this path");
  app.add_option("--workers", config.workers, "Worker threads")
      ->envname("FDSTAT_WORKERS")
      ->check(CLI::PositiveNumber);
  app.add_option("--calibration", config.calibration, "Depth p-value reference set")
      ->check(CLI::IsMember({"pooled", "excluded"}));
  app.add_flag("--smoothed", config.smoothed, "Use (count + 1) / (B + 1) p-values");
  app.add_flag("!--no-tiebreak", config.tiebreak, "Disable RHD/IFD tie-breaking");
  app.add_option("--alpha", config.alpha, "Test level for power studies");

  app.add_option("--data", config.data, "Curves CSV (depth reference; two-sample with group column)");
  app.add_option("--query", config.query, "Query curves CSV for the depth command");
  app.add_option("--x", config.x, "Regressor curves CSV");
  app.add_option("--y", config.y, "Response curves CSV");
  app.add_option("--x0", config.x0, "New regressor CSV (one curve)");

  app.add_option("--max-candidate", config.max_candidate, "Largest truncation tried by CV");
  app.add_option("--folds", config.folds, "Cross-validation folds");
  app.add_option("--rho", config.rho, "Variance-explained threshold");

  app.add_option("--scenario", config.scenario, "Scenario family")
      ->check(CLI::IsMember({"two-sample", "fofr"}));
  app.add_option("--shape", config.shape, "Mean shape (Mag, Jump, Peak, Lin, Quad, Cub, Wig)");
  app.add_option("--n", config.n, "Total sample size");
  app.add_option("--scores", config.scores, "Score type (N1, NN, NE)");
  app.add_option("--a1", config.a1, "Eigenvalue decay, group 1");
  app.add_option("--a2", config.a2, "Eigenvalue decay, group 2");
  app.add_option("--basis1", config.basis1, "Basis, group 1 (tri, mono, cheb, spl)");
  app.add_option("--basis2", config.basis2, "Basis, group 2");
  app.add_option("--aX", config.aX, "Regressor eigenvalue decay");
  app.add_option("--aE", config.aE, "Error eigenvalue decay");
  app.add_option("--b", config.b, "Slope coefficient decay");
  app.add_option("--c", config.c, "Alternative scale for gen");
  app.add_option("--J-true", config.J_true, "Karhunen-Loeve terms");
  app.add_option("--J0", config.J0, "Slope index offset");
  app.add_option("--scales", config.scales, "Alternative scales for power")->delimiter(',');

  for (const char* name : {"depth", "two-sample", "fofr", "power", "gen"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("depth")->description("Depth of query curves in a reference sample");
  app.get_subcommand("two-sample")->description("Two-sample mean tests");
  app.get_subcommand("fofr")->description("Mean-response test in function-on-function regression");
  app.get_subcommand("power")->description("Monte Carlo rejection rates");
  app.get_subcommand("gen")->description("Write simulated scenario data as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help lands here too, with status 0.
    return app.exit(e) == 0 ? 0 : 2;
  }
  config.command = app.get_subcommands().front()->get_name();

  try {
    if (!u_text.empty()) {
      const double u = std::stod(u_text);
      if (!(u > 0.0 && u < 1.0)) throw fdstat::Error(fdstat::Errc::usage, "--u must lie in (0,1)");
      config.u = u;
    }
    if (config.command == "depth") return cmd_depth(config, std::cout);
    if (config.command == "two-sample") return cmd_two_sample(config, std::cout);
    if (config.command == "fofr") return cmd_fofr(config, std::cout);
    if (config.command == "power") return cmd_power(config, std::cout);
    return cmd_gen(config, std::cout);
  } catch (const fdstat::Error& e) {
    std::cerr << "fdstat: " << e.what() << '\n';
    return e.code() == fdstat::Errc::usage || e.code() == fdstat::Errc::parse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "fdstat: " << e.what() << '\n';
    return 1;
  }
}
