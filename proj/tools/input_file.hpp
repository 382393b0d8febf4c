#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gssl/experiment.hpp"
#include "gssl/types.hpp"

namespace gssl::cli {

/// Malformed or unreadable input file; the message names the path and, for
/// parse failures, the 1-based line number.
class InputFileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputFileError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    // Tolerate blank lines (including a trailing newline).
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') blank = false;
    if (blank) continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      const std::string token =
          pos == std::string::npos ? line.substr(start) : line.substr(start, pos - start);
      try {
        row.push_back(parse_double(token));
      } catch (const std::invalid_argument& e) {
        throw InputFileError(path + ":" + std::to_string(line_number) + ": " + e.what());
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputFileError(path + ":" + std::to_string(line_number) +
                           ": expected " + std::to_string(rows.front().size()) +
                           " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputFileError(path + ": no data rows");
  return rows;
}

}  // namespace detail

/// Comma-separated point matrix, one point per row.
inline MatrixXd read_points(const std::string& path) {
  const auto rows = detail::read_rows(path);
  MatrixXd points(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return points;
}

struct LabeledPoints {
  MatrixXd inputs;
  VectorXd labels;
};

/// Points whose trailing column is the response label.
inline LabeledPoints read_labeled_points(const std::string& path) {
  const auto rows = detail::read_rows(path);
  if (rows.front().size() < 2)
    throw InputFileError(path + ": labeled rows need at least one feature column "
                         "plus the label column");
  const Index n = static_cast<Index>(rows.size());
  const Index dim = static_cast<Index>(rows.front().size()) - 1;
  LabeledPoints out{MatrixXd(n, dim), VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < dim; ++j)
      out.inputs(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    out.labels(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(dim)];
  }
  return out;
}

}  // namespace gssl::cli
