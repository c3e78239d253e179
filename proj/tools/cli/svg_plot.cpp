#include "cli/svg_plot.hpp"

#include "effridge/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace effridge::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

double column(const ResultTable& t, const ResultRow& r, const std::string& name) {
  if (name == "N") return static_cast<double>(r.N);
  if (name == "P") return r.P;
  if (name == "gamma") return r.gamma;
  if (name == "lambda") return r.lambda;
  return r.metrics[t.metric_index(name)];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double unit(double v) const { return (transform(v) - lo) / (hi - lo); }

  static Axis fit(const std::vector<double>& values, bool log) {
    Axis a;
    a.log = log && std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
    a.lo = std::numeric_limits<double>::infinity();
    a.hi = -a.lo;
    for (double v : values) {
      a.lo = std::min(a.lo, a.transform(v));
      a.hi = std::max(a.hi, a.transform(v));
    }
    if (values.empty()) {
      a.lo = 0.0;
      a.hi = 1.0;
    }
    if (a.hi - a.lo < 1e-12 * std::max(1.0, std::abs(a.hi))) {
      a.lo -= 0.5;
      a.hi += 0.5;
    }
    return a;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log && hi - lo >= 1.0) {
      for (double e = std::ceil(lo); e <= hi + 1e-12; e += 1.0) out.push_back(std::pow(10.0, e));
      return out;
    }
    for (int i = 0; i <= 4; ++i) {
      const double t = lo + (hi - lo) * i / 4.0;
      out.push_back(log ? std::pow(10.0, t) : t);
    }
    return out;
  }
};

}  // namespace

PlotLayout layout_for(const std::string& experiment) {
  if (experiment == "solve") return {"gamma", "lambda", true, true};
  if (experiment == "calibrate") return {"lambda_star", "gamma", true, true};
  if (experiment == "average-rf") return {"gamma", "lambda", true, false};
  if (experiment == "double-descent") return {"gamma", "lambda", true, true};
  if (experiment == "stieltjes") return {"P", "lambda", true, true};
  if (experiment == "expected-a") return {"P", "lambda", true, true};
  if (experiment == "predictor-fan") return {"x", "gamma", false, false};
  return {"gamma", "lambda", false, false};
}

std::string render_svg(const ResultTable& table, const std::string& metric, const PlotLayout& layout) {
  std::vector<double> series_keys;
  std::vector<std::vector<std::pair<double, double>>> series;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : table.rows) {
    const double key = column(table, row, layout.series);
    auto it = std::find(series_keys.begin(), series_keys.end(), key);
    if (it == series_keys.end()) {
      series_keys.push_back(key);
      series.emplace_back();
      it = series_keys.end() - 1;
    }
    const double x = column(table, row, layout.x);
    const double y = row.metrics[table.metric_index(metric)];
    series[static_cast<std::size_t>(it - series_keys.begin())].emplace_back(x, y);
    xs.push_back(x);
    ys.push_back(y);
  }
  for (auto& s : series) std::stable_sort(s.begin(), s.end(), [](auto a, auto b) { return a.first < b.first; });

  const Axis ax = Axis::fit(xs, layout.log_x);
  const Axis ay = Axis::fit(ys, layout.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + pw * ax.unit(x); };
  const auto py = [&](double y) { return kTop + ph * (1.0 - ay.unit(y)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" +
         table.experiment + ": " + metric + "</text>\n";
  svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(pw) +
         "\" height=\"" + coord(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(kTop + ph) + "\" x2=\"" + coord(x) +
           "\" y2=\"" + coord(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    svg += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(kLeft) +
           "\" y2=\"" + coord(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) +
           "\" text-anchor=\"end\">" + num(t) + "</text>\n";
  }
  svg += "<text x=\"" + coord(kLeft + pw / 2) + "\" y=\"" + coord(kHeight - 12) +
         "\" text-anchor=\"middle\">" + layout.x + (ax.log ? " (log)" : "") + "</text>\n";
  svg += "<text x=\"16\" y=\"" + coord(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         coord(kTop + ph / 2) + ")\">" + metric + (ay.log ? " (log)" : "") + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      if (i) svg += ' ';
      svg += coord(px(series[s][i].first)) + "," + coord(py(series[s][i].second));
    }
    svg += "\"/>\n";
    const double ly = kTop + 10 + 16 * static_cast<double>(s);
    svg += "<line x1=\"" + coord(kWidth - kRight + 12) + "\" y1=\"" + coord(ly) + "\" x2=\"" +
           coord(kWidth - kRight + 32) + "\" y2=\"" + coord(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + coord(kWidth - kRight + 36) + "\" y=\"" + coord(ly + 4) + "\">" +
           layout.series + "=" + num(series_keys[s]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::pair<std::string, std::string>> render_all_plots(const ResultTable& table) {
  const PlotLayout layout = layout_for(table.experiment);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& metric : table.metric_names) {
    if (metric == layout.x) continue;
    out.emplace_back("plot_" + metric + ".svg", render_svg(table, metric, layout));
  }
  return out;
}

}  // namespace effridge::cli
