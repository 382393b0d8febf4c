#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gssl/datagen.hpp"
#include "gssl/types.hpp"

namespace gssl {

/// Monte-Carlo sweep design: grids over the labeled size n, the unlabeled
/// size m and the regularization weight lambda (INFINITY allowed), a
/// replication count, and the master seed every substream derives from.
/// Within a replication one dataset is sampled and scored under every lambda.
struct ExperimentConfig {
  SimModel model = SimModel::Model1;
  std::vector<Index> n_grid;
  std::vector<Index> m_grid;
  std::vector<double> lambda_grid;
  int replications = 200;
  RngSeed master_seed{0};
  std::string output_path;

  void validate() const;  // throws std::invalid_argument
};

/// One Monte-Carlo measurement: RMSE of the estimated scores against the
/// true regression function on the unlabeled points.
struct RmseRecord {
  SimModel model = SimModel::Model1;
  Index n = 0;
  Index m = 0;
  double lambda = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;

  friend bool operator==(const RmseRecord&, const RmseRecord&) = default;
};

struct CellFailure {
  Index n = 0;
  Index m = 0;
  int replication = 0;
  std::string message;
};

struct SweepResult {
  std::vector<RmseRecord> records;
  std::vector<CellFailure> failures;
};

struct CellMean {
  SimModel model = SimModel::Model1;
  Index n = 0;
  Index m = 0;
  double lambda = 0.0;
  double mean_rmse = 0.0;
  int count = 0;
};

/// sqrt(mean squared componentwise difference).
double rmse(const VectorXd& truth, const VectorXd& estimates);

/// Samples one dataset for the cell with streams derived from
/// (master_seed, replication, role), scores it under every lambda in the
/// grid (0 = hard criterion, finite = soft, INFINITY = mean collapse), and
/// returns one record per lambda. Because the derivation does not involve
/// the cell, grid cells of one replication share their leading draws: the
/// (n, m) dataset is a prefix extension of any smaller cell's, which pairs
/// the cells for sharper trend comparisons. Solver failures propagate with
/// the cell's identifying metadata attached.
std::vector<RmseRecord> run_replication(const ExperimentConfig& config, Index n,
                                        Index m, int replication);

/// Cartesian product of the grids times replications. A failed replication
/// is recorded, not fatal. Output order is canonical (grid order, then
/// replication, then lambda) regardless of the thread count.
SweepResult sweep(const ExperimentConfig& config, unsigned threads = 1);

/// Mean RMSE per (model, n, m, lambda) cell, in first-appearance order.
std::vector<CellMean> aggregate_mean(const std::vector<RmseRecord>& records);

void write_records(const std::vector<RmseRecord>& records, const std::string& path);
std::vector<RmseRecord> read_records(const std::string& path);

/// Flat key=value config: keys model, n_grid, m_grid, lambda_grid,
/// replications, master_seed, output_path; grids comma-separated; lambda
/// INFINITY spelled "inf".
ExperimentConfig read_config(const std::string& path);

void write_summary(std::ostream& out, const std::vector<CellMean>& means);

/// Shortest decimal form that parses back to the same double; infinities
/// serialize as "inf"/"-inf".
std::string format_double(double value);
double parse_double(const std::string& text);

std::vector<Index> parse_index_list(const std::string& text);
std::vector<double> parse_lambda_list(const std::string& text);

}  // namespace gssl
