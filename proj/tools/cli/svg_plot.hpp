#pragma once

#include "cli/results.hpp"

#include <string>
#include <utility>
#include <vector>

namespace effridge::cli {

struct PlotLayout {
  std::string x;       // key column (gamma, lambda, P, N) or metric name
  std::string series;  // one polyline per distinct value of this column
  bool log_x = false;
  bool log_y = false;  // falls back to linear when a series has a value <= 0
};

PlotLayout layout_for(const std::string& experiment);

/// Line plot of one metric; a pure function of the table.
std::string render_svg(const ResultTable& table, const std::string& metric, const PlotLayout& layout);

/// (file name, contents) for plot_<metric>.svg over every metric except the x column.
std::vector<std::pair<std::string, std::string>> render_all_plots(const ResultTable& table);

}  // namespace effridge::cli
