#include "fdstat/power.hpp"

#include <sstream>

#include "fdstat/parallel.hpp"

namespace fdstat {

namespace {

template <class Run>
std::vector<PowerRow> sweep(const std::string& name, std::span<const double> scales,
                            const std::vector<std::string>& method_names,
                            const PowerOptions& options, RngStream rng, Run&& run) {
  if (options.replicates < 1) throw Error(Errc::invalid_argument, "need at least one replicate");
  const std::size_t M = method_names.size();
  const auto R = static_cast<std::size_t>(options.replicates);
  std::vector<PowerRow> rows;
  for (double c : scales) {
    // rejected[r * M + m]
    std::vector<char> rejected(R * M, 0);
    parallel_for(R, options.workers, [&](std::size_t r) {
      const RngStream rep = rng.child(stream_tag::replicate, r);
      const std::vector<double> p = run(c, rep);
      for (std::size_t m = 0; m < M; ++m) rejected[r * M + m] = p[m] <= options.alpha ? 1 : 0;
    });
    for (std::size_t m = 0; m < M; ++m) {
      PowerRow row{name, method_names[m], c, 0, options.replicates, 0.0};
      for (std::size_t r = 0; r < R; ++r) row.rejections += rejected[r * M + m];
      row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.replicates);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

std::string scenario_name(const TwoSampleScenario& s) {
  std::ostringstream out;
  out << "two-sample:" << to_string(s.shape) << ":n=" << s.n << ":" << to_string(s.scores)
      << ":a=" << s.a1 << "/" << s.a2 << ":" << to_string(s.basis1) << "/" << to_string(s.basis2);
  return out.str();
}

std::string scenario_name(const FoFRScenario& s) {
  std::ostringstream out;
  out << "fofr:n=" << s.n << ":" << to_string(s.scores) << ":aX=" << s.aX << ":aE=" << s.aE
      << ":b=" << s.b;
  return out.str();
}

std::vector<PowerRow> two_sample_power(const TwoSampleScenario& scenario,
                                       std::span<const double> scales,
                                       std::span<const TwoSampleMethod> methods,
                                       const TwoSampleOptions& test_options,
                                       const PowerOptions& options, const GridPtr& grid,
                                       RngStream rng) {
  std::vector<std::string> names;
  for (auto m : methods) names.push_back(to_string(m));
  TwoSampleOptions inner = test_options;
  inner.workers = 1;
  return sweep(scenario_name(scenario), scales, names, options, rng,
               [&](double c, const RngStream& rep) {
                 TwoSampleScenario s = scenario;
                 s.c = c;
                 const TwoSampleData d =
                     make_two_sample_scenario(s, grid, rep.child(stream_tag::data));
                 const auto reports = two_sample_tests(d, methods, inner, rep.child(stream_tag::test));
                 std::vector<double> p;
                 for (const auto& r : reports) p.push_back(r.pvalue);
                 return p;
               });
}

std::vector<PowerRow> fofr_power(const FoFRScenario& scenario, std::span<const double> scales,
                                 std::span<const FoFRMethod> methods,
                                 const FoFROptions& test_options, const PowerOptions& options,
                                 const GridPtr& grid, RngStream rng) {
  std::vector<std::string> names;
  for (auto m : methods) names.push_back(to_string(m));
  FoFROptions inner = test_options;
  inner.workers = 1;
  return sweep(scenario_name(scenario), scales, names, options, rng,
               [&](double c, const RngStream& rep) {
                 FoFRScenario s = scenario;
                 s.c = c;
                 const FoFRData d = make_fofr_scenario(s, grid, rep.child(stream_tag::data));
                 const FoFRResult result = fofr_tests(d, methods, inner, rep.child(stream_tag::test));
                 std::vector<double> p;
                 for (const auto& r : result.reports) p.push_back(r.pvalue);
                 return p;
               });
}

}  // namespace fdstat
