#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fdstat/cli.hpp"
#include "fdstat/parallel.hpp"

namespace fdstat::cli {

using nlohmann::ordered_json;

namespace {

const char* kTwoSampleMethods = "ITD,IFD,RHD,KD,L2,SUP,FINT,FMAX";
const char* kFoFRMethods = "RHD,KD,L2,SUP";

// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::usage, "cannot write '" + path + "'");
  out << text;
}

ordered_json envelope(const RunConfig& config) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = config.command;
  j["config"] = config.to_json();
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::usage, what);
}

}  // namespace

int cmd_depth(const RunConfig& config, std::ostream& stdout_stream) {
  require(!config.data.empty(), "depth needs --data (the reference curves)");
  const FunctionalSample ensemble = ingest_csv(config.data);
  const FunctionalSample queries = config.query.empty() ? ensemble : ingest_csv(config.query);
  if (!queries.grid()->compatible_with(*ensemble.grid()))
    throw Error(Errc::usage, "query and reference curves use different grids");

  DepthSpec spec;
  spec.kind = parse_depth_kind(config.method.empty() ? "KD" : config.method);
  spec.quantile_u = config.u.value_or(spec.kind == DepthKind::RHD ? 0.1 : 0.01);
  spec.kernel = parse_kernel_kind(config.kernel);
  spec.projections = config.projections;
  spec.tiebreak = config.tiebreak;
  const auto depth =
      make_depth_function(spec, ensemble, RngStream(config.seed).child(stream_tag::directions));

  std::vector<DepthValue> values(static_cast<std::size_t>(queries.size()));
  parallel_for(values.size(), config.workers, [&](std::size_t i) {
    values[i] = depth->evaluate(queries.column(static_cast<Index>(i)));
  });

  ordered_json j = envelope(config);
  j["depth_spec"] = depth_spec_json(spec);
  j["reference_size"] = ensemble.size();
  ordered_json list = ordered_json::array();
  for (const auto& v : values) {
    ordered_json item;
    item["depth"] = v.value;
    if (v.tiebreak_key) item["tiebreak_key"] = *v.tiebreak_key;
    list.push_back(item);
  }
  j["depths"] = list;
  write_text(config.out, dump(j), stdout_stream);
  return 0;
}

int cmd_two_sample(const RunConfig& config, std::ostream& stdout_stream) {
  require(!config.data.empty(), "two-sample needs --data (curves with a group column)");
  const TwoSampleData d = split_groups(ingest_csv(config.data));
  const auto methods =
      parse_two_sample_methods(config.method.empty() ? kTwoSampleMethods : config.method);
  const TwoSampleOptions options = two_sample_options(config);
  const RngStream rng(config.seed);
  const auto reports = two_sample_tests(d, methods, options, rng);

  ordered_json j = envelope(config);
  j["n1"] = d.n1();
  j["n2"] = d.n2();
  j["grid_size"] = d.group1.grid()->size();
  ordered_json results = ordered_json::array();
  for (const auto& r : reports) results.push_back(report_json(r));
  j["results"] = results;
  write_text(config.out, dump(j), stdout_stream);

  if (!config.svg.empty()) {
    const BootstrapEnsemble ens = residual_bootstrap_two(d, config.B, rng, config.workers);
    write_text(config.svg,
               svg_ensemble(two_sample_statistic(d), ens.statistics,
                            "two-sample statistic and bootstrap statistics"),
               stdout_stream);
  }
  return 0;
}

int cmd_fofr(const RunConfig& config, std::ostream& stdout_stream) {
  require(!config.x.empty() && !config.y.empty() && !config.x0.empty(),
          "fofr needs --x, --y and --x0");
  const FunctionalSample X = ingest_csv(config.x);
  const FunctionalSample Y = ingest_csv(config.y);
  const FunctionalSample x0 = ingest_csv(config.x0);
  if (!X.grid()->compatible_with(*Y.grid()) || !X.grid()->compatible_with(*x0.grid()))
    throw Error(Errc::usage, "regressor, response and new-regressor files use different grids");
  require(X.size() == Y.size(), "regressor and response files hold different numbers of curves");
  require(x0.size() == 1, "the new-regressor file must hold exactly one curve");
  const FoFRData d(X, Y, x0.curve(0));

  const auto methods = parse_fofr_methods(config.method.empty() ? kFoFRMethods : config.method);
  const FoFROptions options = fofr_options(config);
  const RngStream rng(config.seed);
  const FoFRResult result = fofr_tests(d, methods, options, rng);

  ordered_json j = envelope(config);
  j["n"] = d.n();
  j["grid_size"] = X.grid()->size();
  ordered_json selection;
  selection["J"] = result.J;
  selection["J_res"] = result.J_res;
  selection["J_cen"] = result.J_cen;
  selection["fve_warning"] = result.fve_warning;
  selection["cv_candidates"] = result.cv.candidates;
  selection["cv_errors"] = result.cv.errors;
  j["selection"] = selection;
  ordered_json results = ordered_json::array();
  for (const auto& r : result.reports) results.push_back(report_json(r));
  j["results"] = results;
  write_text(config.out, dump(j), stdout_stream);

  if (!config.svg.empty()) {
    const FPCRFit fit = fpcr_fit(d.X, d.Y, result.J, result.J_res, result.J_cen);
    const BootstrapEnsemble ens = fofr_bootstrap(d, fit, config.B, rng, config.workers);
    write_text(config.svg,
               svg_ensemble(fofr_statistic(d, fit), ens.statistics,
                            "regression statistic and bootstrap statistics"),
               stdout_stream);
  }
  return 0;
}

int cmd_power(const RunConfig& config, std::ostream& stdout_stream) {
  const GridPtr grid = make_grid(config.grid);
  PowerOptions po;
  po.replicates = config.reps;
  po.alpha = config.alpha;
  po.workers = config.workers;
  const RngStream rng(config.seed);

  std::vector<PowerRow> rows;
  if (config.scenario == "two-sample") {
    const auto methods =
        parse_two_sample_methods(config.method.empty() ? kTwoSampleMethods : config.method);
    TwoSampleOptions options = two_sample_options(config);
    rows = two_sample_power(two_sample_scenario(config), config.scales, methods, options, po, grid,
                            rng);
  } else if (config.scenario == "fofr") {
    const auto methods = parse_fofr_methods(config.method.empty() ? kFoFRMethods : config.method);
    rows = fofr_power(fofr_scenario(config), config.scales, methods, fofr_options(config), po, grid,
                      rng);
  } else {
    throw Error(Errc::usage, "unknown scenario '" + config.scenario + "'");
  }

  std::ostringstream csv;
  csv << "scenario,method,c,rejections,replicates,rate\n";
  for (const auto& r : rows)
    csv << r.scenario << ',' << r.method << ',' << shortest(r.c) << ',' << r.rejections << ','
        << r.replicates << ',' << shortest(r.rate) << '\n';
  write_text(config.out, csv.str(), stdout_stream);

  if (!config.svg.empty())
    write_text(config.svg, svg_power(rows, config.alpha, rows.empty() ? "" : rows.front().scenario),
               stdout_stream);
  return 0;
}

int cmd_gen(const RunConfig& config, std::ostream& stdout_stream) {
  const GridPtr grid = make_grid(config.grid);
  const RngStream rng = RngStream(config.seed).child(stream_tag::data);
  if (config.scenario == "two-sample") {
    const TwoSampleData d = make_two_sample_scenario(two_sample_scenario(config), grid, rng);
    MatrixXd values(grid->size(), d.n1() + d.n2());
    values << d.group1.values(), d.group2.values();
    std::vector<std::string> labels(static_cast<std::size_t>(d.n1()), "1");
    labels.resize(static_cast<std::size_t>(d.n1() + d.n2()), "2");
    const FunctionalSample all(grid, std::move(values), std::move(labels));
    std::ostringstream csv;
    write_csv(csv, all);
    write_text(config.out, csv.str(), stdout_stream);
    return 0;
  }
  if (config.scenario == "fofr") {
    require(!config.out.empty(), "gen --scenario fofr needs --out as a file prefix");
    const FoFRData d = make_fofr_scenario(fofr_scenario(config), grid, rng);
    emit_csv(config.out + "_X.csv", d.X);
    emit_csv(config.out + "_Y.csv", d.Y);
    const Curve& x0 = d.x0;
    emit_csv(config.out + "_x0.csv", FunctionalSample(grid, MatrixXd(x0.values)));
    return 0;
  }
  throw Error(Errc::usage, "unknown scenario '" + config.scenario + "'");
}

}  // namespace fdstat::cli
