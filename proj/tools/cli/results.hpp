#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace effridge::cli {

/// Fixed leading columns of every results file.
inline constexpr const char* kKeyColumns = "experiment,N,P,gamma,lambda,seed,trials";

struct ResultRow {
  long N = 0;
  double P = 0.0;  // gamma N; not an integer for theory-only grids
  double gamma = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<double> metrics;
};

struct ResultTable {
  std::string experiment;
  std::vector<std::string> metric_names;
  std::vector<ResultRow> rows;

  /// Index of a metric column; throws InvalidInput if absent.
  std::size_t metric_index(const std::string& name) const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Throws NumericError on a non-finite metric and InvalidInput on a width mismatch.
std::string to_csv(const ResultTable& table);
ResultTable parse_results_csv(const std::string& text);

std::string read_file(const std::string& path);
/// Writes to `<path>.tmp` then renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace effridge::cli
