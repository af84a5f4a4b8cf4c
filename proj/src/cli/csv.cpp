#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fdstat/cli.hpp"

namespace fdstat::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void fail(const std::string& source, std::size_t row, std::size_t column,
                       const std::string& what) {
  throw Error(Errc::parse, source + ": row " + std::to_string(row) + ", column " +
                               std::to_string(column) + ": " + what);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t row,
                  std::size_t column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (cell.empty() || ec != std::errc() || ptr != end)
    fail(source, row, column, "'" + cell + "' is not a number");
  if (!std::isfinite(v)) fail(source, row, column, "value must be finite");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FunctionalSample read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) {
      header = split_cells(line);
      break;
    }
  }
  if (header.empty()) throw Error(Errc::parse, source + ": missing header row");
  const std::size_t header_row = row;

  const bool labelled = header.front() == "group";
  const std::size_t offset = labelled ? 1 : 0;
  const std::size_t p = header.size() - offset;
  if (p < 2) fail(source, header_row, 1, "the header needs at least 2 grid points");
  VectorXd points(static_cast<Index>(p));
  for (std::size_t k = 0; k < p; ++k) {
    const double t = parse_cell(header[k + offset], source, header_row, k + offset + 1);
    if (t < 0.0 || t > 1.0) fail(source, header_row, k + offset + 1, "grid point outside [0,1]");
    if (k > 0 && !(t > points[static_cast<Index>(k - 1)]))
      fail(source, header_row, k + offset + 1, "grid points must be strictly increasing");
    points[static_cast<Index>(k)] = t;
  }

  std::vector<VectorXd> curves;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != header.size())
      fail(source, row, cells.size() + 1,
           "expected " + std::to_string(header.size()) + " cells, found " +
               std::to_string(cells.size()));
    if (labelled) {
      if (cells.front().empty()) fail(source, row, 1, "empty group label");
      labels.push_back(cells.front());
    }
    VectorXd v(static_cast<Index>(p));
    for (std::size_t k = 0; k < p; ++k)
      v[static_cast<Index>(k)] = parse_cell(cells[k + offset], source, row, k + offset + 1);
    curves.push_back(std::move(v));
  }
  if (curves.empty()) throw Error(Errc::parse, source + ": no curves after the header");

  MatrixXd values(static_cast<Index>(p), static_cast<Index>(curves.size()));
  for (std::size_t i = 0; i < curves.size(); ++i) values.col(static_cast<Index>(i)) = curves[i];
  return FunctionalSample(make_grid(std::move(points)), std::move(values), std::move(labels));
}

FunctionalSample ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::usage, "cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const FunctionalSample& sample) {
  const bool labelled = !sample.labels().empty();
  const VectorXd& t = sample.grid()->points();
  if (labelled) out << "group,";
  for (Index k = 0; k < t.size(); ++k) out << (k ? "," : "") << format_double(t[k]);
  out << '\n';
  for (Index i = 0; i < sample.size(); ++i) {
    if (labelled) out << sample.labels()[static_cast<std::size_t>(i)] << ',';
    for (Index k = 0; k < t.size(); ++k)
      out << (k ? "," : "") << format_double(sample.values()(k, i));
    out << '\n';
  }
}

void emit_csv(const std::string& path, const FunctionalSample& sample) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::usage, "cannot write '" + path + "'");
  write_csv(out, sample);
}

}  // namespace fdstat::cli
