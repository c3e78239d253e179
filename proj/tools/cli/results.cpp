#include "cli/results.hpp"

#include "effridge/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

namespace effridge::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <class T>
T parse_number(const std::string& cell, long line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError("bad numeric cell '" + cell + "'", line);
  }
  return value;
}

}  // namespace

std::size_t ResultTable::metric_index(const std::string& name) const {
  for (std::size_t i = 0; i < metric_names.size(); ++i) {
    if (metric_names[i] == name) return i;
  }
  throw InvalidInput("no metric column '" + name + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw NumericError("cannot format double");
  return std::string(buf, ptr);
}

std::string to_csv(const ResultTable& table) {
  std::string out = kKeyColumns;
  for (const auto& name : table.metric_names) out += "," + name;
  out += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.metrics.size() != table.metric_names.size()) {
      throw InvalidInput("row " + std::to_string(r) + " has the wrong number of metrics");
    }
    const auto check = [&](double v, const std::string& col) {
      if (!std::isfinite(v)) {
        throw NumericError("non-finite value in column " + col + " at gamma=" +
                           format_double(row.gamma) + " lambda=" + format_double(row.lambda));
      }
    };
    check(row.P, "P");
    check(row.gamma, "gamma");
    check(row.lambda, "lambda");
    out += table.experiment;
    out += "," + std::to_string(row.N) + "," + format_double(row.P) + "," +
           format_double(row.gamma) + "," + format_double(row.lambda) + "," +
           std::to_string(row.seed) + "," + std::to_string(row.trials);
    for (std::size_t m = 0; m < row.metrics.size(); ++m) {
      check(row.metrics[m], table.metric_names[m]);
      out += "," + format_double(row.metrics[m]);
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty results file", 1);
  const std::string keys = kKeyColumns;
  if (line.rfind(keys, 0) != 0) throw ParseError("results header must start with " + keys, 1);

  ResultTable table;
  const auto header = split(line);
  constexpr std::size_t n_keys = 7;
  table.metric_names.assign(header.begin() + n_keys, header.end());

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " columns", line_no);
    }
    if (table.experiment.empty()) {
      table.experiment = cells[0];
    } else if (cells[0] != table.experiment) {
      throw ParseError("mixed experiments in one results file", line_no);
    }
    ResultRow row;
    row.N = parse_number<long>(cells[1], line_no);
    row.P = parse_number<double>(cells[2], line_no);
    row.gamma = parse_number<double>(cells[3], line_no);
    row.lambda = parse_number<double>(cells[4], line_no);
    row.seed = parse_number<std::uint64_t>(cells[5], line_no);
    row.trials = parse_number<int>(cells[6], line_no);
    for (std::size_t m = n_keys; m < cells.size(); ++m) {
      row.metrics.push_back(parse_number<double>(cells[m], line_no));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace effridge::cli
