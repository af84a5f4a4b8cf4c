#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fdstat/cli.hpp"

namespace fdstat::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

void open_svg(std::ostringstream& s, const Frame& f, const std::string& title,
              const std::string& xlabel, const std::string& ylabel) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  s << "<g stroke=\"black\" fill=\"none\">"
    << "<line x1=\"" << kLeft << "\" y1=\"" << f.py(f.y0) << "\" x2=\"" << kWidth - kRight
    << "\" y2=\"" << f.py(f.y0) << "\"/>"
    << "<line x1=\"" << kLeft << "\" y1=\"" << f.py(f.y0) << "\" x2=\"" << kLeft << "\" y2=\""
    << f.py(f.y1) << "\"/></g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    s << "<text x=\"" << f.px(x) << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">"
      << num(y) << "</text>\n";
  }
  s << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  s << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << kHeight / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

void polyline(std::ostringstream& s, const Frame& f, const VectorXd& x, const VectorXd& y,
              const std::string& style) {
  s << "<polyline fill=\"none\" " << style << " points=\"";
  for (Index k = 0; k < x.size(); ++k) s << (k ? " " : "") << num(f.px(x[k])) << ',' << num(f.py(y[k]));
  s << "\"/>\n";
}

}  // namespace

std::string svg_ensemble(const Curve& observed, const FunctionalSample& ensemble,
                         const std::string& title) {
  const VectorXd& t = observed.grid->points();
  double lo = std::min(observed.values.minCoeff(), ensemble.values().minCoeff());
  double hi = std::max(observed.values.maxCoeff(), ensemble.values().maxCoeff());
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const Frame f{t[0], t[t.size() - 1], lo, hi};
  std::ostringstream s;
  open_svg(s, f, title, "t", "statistic");
  for (Index b = 0; b < ensemble.size(); ++b)
    polyline(s, f, t, ensemble.values().col(b), "stroke=\"#b0b0b0\" stroke-width=\"0.6\"");
  polyline(s, f, t, observed.values, "stroke=\"black\" stroke-width=\"2\"");
  s << "</svg>\n";
  return s.str();
}

std::string svg_power(const std::vector<PowerRow>& rows, double alpha, const std::string& title) {
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  std::vector<std::string> order;
  double cmin = 0.0, cmax = 1.0;
  for (const auto& r : rows) {
    if (!curves.count(r.method)) order.push_back(r.method);
    curves[r.method].emplace_back(r.c, r.rate);
    cmin = std::min(cmin, r.c);
    cmax = std::max(cmax, r.c);
  }
  const Frame f{cmin, cmax, 0.0, 1.0};
  std::ostringstream s;
  open_svg(s, f, title, "c", "rejection rate");
  s << "<line x1=\"" << f.px(cmin) << "\" y1=\"" << f.py(alpha) << "\" x2=\"" << f.px(cmax)
    << "\" y2=\"" << f.py(alpha) << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t m = 0; m < order.size(); ++m) {
    auto pts = curves[order[m]];
    std::sort(pts.begin(), pts.end());
    VectorXd x(static_cast<Index>(pts.size())), y(static_cast<Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) {
      x[static_cast<Index>(k)] = pts[k].first;
      y[static_cast<Index>(k)] = pts[k].second;
    }
    const std::string color = palette[m % 8];
    polyline(s, f, x, y, "stroke=\"" + color + "\" stroke-width=\"2\"");
    s << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 14 * (m + 1)
      << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(order[m]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace fdstat::cli
