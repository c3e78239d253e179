#include "cli/datasets.hpp"

#include "effridge/errors.hpp"
#include "effridge/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string_view>
#include <vector>

namespace effridge::cli {

namespace {

ParseError at_line(const std::string& what, long line) {
  return ParseError("line " + std::to_string(line) + ": " + what, line);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, long line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw at_line("non-numeric cell '" + std::string(cell) + "'", line);
  }
  if (!std::isfinite(value)) throw at_line("non-finite cell '" + std::string(cell) + "'", line);
  return value;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);

  std::string line;
  if (!std::getline(in, line)) throw at_line("empty file, expected header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header.back() != "y") {
    throw at_line("header must be x_0,...,x_{d-1},y", 1);
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j] != "x_" + std::to_string(j)) {
      throw at_line("header column " + std::to_string(j) + " must be x_" + std::to_string(j), 1);
    }
  }

  std::vector<double> values;
  long line_no = 1;
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != dim + 1) {
      throw at_line("expected " + std::to_string(dim + 1) + " columns, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    for (const auto cell : cells) values.push_back(parse_cell(cell, line_no));
    ++rows;
  }
  if (rows == 0) throw at_line("no data rows", line_no);

  Dataset data;
  data.X.resize(rows, static_cast<Eigen::Index>(dim));
  data.y.resize(rows);
  for (long i = 0; i < rows; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * (dim + 1);
    for (std::size_t j = 0; j < dim; ++j) data.X(i, static_cast<Eigen::Index>(j)) = values[base + j];
    data.y(i) = values[base + dim];
  }
  check_distinct_rows(data.X);
  return data;
}

ExperimentData generate_sinusoid(Eigen::Index n, Eigen::Index n_test, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sinusoid needs n >= 1");
  if (n_test < 1) throw InvalidInput("sinusoid needs n_test >= 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Rng rng(SeedPolicy{seed, 0});
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = two_pi * rng.uniform();
  std::sort(xs.begin(), xs.end());

  ExperimentData out;
  out.train.X.resize(n, 1);
  out.train.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.train.X(i, 0) = xs[static_cast<std::size_t>(i)];
    out.train.y(i) = std::sin(out.train.X(i, 0));
  }
  out.train.f_star = out.train.y;
  check_distinct_rows(out.train.X);

  out.test_X.resize(n_test, 1);
  out.test_f_star.resize(n_test);
  for (Eigen::Index k = 0; k < n_test; ++k) {
    out.test_X(k, 0) = two_pi * static_cast<double>(k) / static_cast<double>(n_test);
    out.test_f_star(k) = std::sin(out.test_X(k, 0));
  }
  return out;
}

ExperimentData generate_clusters(Eigen::Index n, Eigen::Index n_test, Eigen::Index dim,
                                 double separation, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("clusters needs n >= 2");
  if (n_test < 1) throw InvalidInput("clusters needs n_test >= 1");
  if (dim < 1) throw InvalidInput("clusters needs dim >= 1");
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw InvalidInput("cluster separation must be finite and nonnegative");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

  const auto draw = [&](Eigen::Index rows, std::uint64_t stream, Matrix& X, Vector& labels) {
    Rng rng(SeedPolicy{seed, stream});
    X.resize(rows, dim);
    labels.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      labels(i) = i % 2 == 0 ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        X(i, j) = scale * (labels(i) * separation + rng.normal());
      }
    }
  };

  ExperimentData out;
  draw(n, 0, out.train.X, out.train.y);
  out.train.f_star = out.train.y;
  check_distinct_rows(out.train.X);
  draw(n_test, 1, out.test_X, out.test_f_star);
  return out;
}

Vector generate_spectrum(SpectrumKind kind, Eigen::Index n) {
  if (n < 1) throw InvalidInput("spectrum needs n >= 1");
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = kind == SpectrumKind::exponential ? std::exp(-static_cast<double>(i) / 2.0)
                                             : 1.0 / static_cast<double>(i + 1);
  }
  return d;
}

}  // namespace effridge::cli
