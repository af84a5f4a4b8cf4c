#pragma once

// Monte Carlo rejection rates over a sweep of alternative scales. Replicate r
// draws its data from rng.child(replicate, r) whatever the scale, so the rate
// curves across c share their noise.

#include <span>
#include <string>
#include <vector>

#include "fdstat/simgen.hpp"

namespace fdstat {

struct PowerRow {
  std::string scenario;
  std::string method;
  double c = 0.0;
  Index rejections = 0;
  Index replicates = 0;
  double rate = 0.0;
};

struct PowerOptions {
  Index replicates = 1000;
  double alpha = 0.05;
  int workers = 1;
};

/// Rejection counts (p-value <= alpha) for every method at every scale c.
std::vector<PowerRow> two_sample_power(const TwoSampleScenario& scenario,
                                       std::span<const double> scales,
                                       std::span<const TwoSampleMethod> methods,
                                       const TwoSampleOptions& test_options,
                                       const PowerOptions& options, const GridPtr& grid,
                                       RngStream rng);

std::vector<PowerRow> fofr_power(const FoFRScenario& scenario, std::span<const double> scales,
                                 std::span<const FoFRMethod> methods,
                                 const FoFROptions& test_options, const PowerOptions& options,
                                 const GridPtr& grid, RngStream rng);

std::string scenario_name(const TwoSampleScenario& s);
std::string scenario_name(const FoFRScenario& s);

}  // namespace fdstat
