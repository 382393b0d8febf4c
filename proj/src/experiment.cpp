#include "gssl/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gssl/kernel_graph.hpp"
#include "gssl/solvers.hpp"

namespace gssl {

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename Int>
Int parse_integer(const std::string& text, const char* what) {
  const std::string t = trim(text);
  Int value{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw std::invalid_argument(std::string(what) + ": not an integer: '" + t + "'");
  return value;
}

SimModel parse_model(const std::string& text) {
  const int id = parse_integer<int>(text, "model");
  if (id != 1 && id != 2)
    throw std::invalid_argument("model: expected 1 or 2, got '" + trim(text) + "'");
  return static_cast<SimModel>(id);
}

std::string cell_context(const ExperimentConfig& config, Index n, Index m,
                         int replication) {
  std::ostringstream out;
  out << "model=" << static_cast<int>(config.model) << " n=" << n << " m=" << m
      << " rep=" << replication;
  return out.str();
}

}  // namespace

double rmse(const VectorXd& truth, const VectorXd& estimates) {
  if (truth.size() != estimates.size())
    throw std::invalid_argument("rmse: length mismatch");
  if (truth.size() < 1)
    throw std::invalid_argument("rmse: need at least one component");
  return std::sqrt((truth - estimates).squaredNorm() /
                   static_cast<double>(truth.size()));
}

void ExperimentConfig::validate() const {
  if (n_grid.empty() || m_grid.empty() || lambda_grid.empty())
    throw std::invalid_argument("config: grids must be non-empty");
  for (Index n : n_grid)
    if (n < 2) throw std::invalid_argument("config: every n must be >= 2");
  for (Index m : m_grid)
    if (m < 1) throw std::invalid_argument("config: every m must be >= 1");
  for (double lambda : lambda_grid)
    if (std::isnan(lambda) || lambda < 0.0)
      throw std::invalid_argument("config: every lambda must be >= 0 or inf");
  if (replications < 1)
    throw std::invalid_argument("config: replications must be >= 1");
}

std::vector<RmseRecord> run_replication(const ExperimentConfig& config, Index n,
                                        Index m, int replication) {
  config.validate();
  if (n < 2 || m < 1 || replication < 0)
    throw std::invalid_argument("run_replication: invalid cell");

  const std::uint64_t rep = static_cast<std::uint64_t>(replication);
  auto inputs_rng = make_stream(config.master_seed, rep, StreamRole::Inputs);
  auto labels_rng = make_stream(config.master_seed, rep, StreamRole::Labels);

  const MatrixXd inputs = sample_truncated_mvn(inputs_rng, n + m);
  VectorXd probs(n);
  for (Index i = 0; i < n; ++i)
    probs(i) = true_probability(config.model, inputs.row(i));
  const VectorXd labels = sample_labels(labels_rng, probs);
  VectorXd truth(m);
  for (Index a = 0; a < m; ++a)
    truth(a) = true_probability(config.model, inputs.row(n + a));

  const auto graph = build_graph(Dataset<double>(inputs, labels),
                                 KernelSpec<double>(bandwidth(n)));
  const std::uint64_t record_seed =
      derive_stream_seed(config.master_seed, rep, StreamRole::Inputs);

  std::vector<RmseRecord> records;
  records.reserve(config.lambda_grid.size());
  for (double lambda : config.lambda_grid) {
    try {
      const ScoreVector<double> scores = solve(graph, labels, lambda);
      records.push_back({config.model, n, m, lambda, replication, record_seed,
                         rmse(truth, scores.values)});
    } catch (const SingularSystemError& e) {
      throw SingularSystemError(cell_context(config, n, m, replication) +
                                    " lambda=" + format_double(lambda) + ": " +
                                    e.what(),
                                e.disconnected_indices());
    }
  }
  return records;
}

SweepResult sweep(const ExperimentConfig& config, unsigned threads) {
  config.validate();

  struct Task {
    Index n;
    Index m;
    int replication;
  };
  std::vector<Task> tasks;
  for (Index n : config.n_grid)
    for (Index m : config.m_grid)
      for (int rep = 0; rep < config.replications; ++rep)
        tasks.push_back({n, m, rep});

  std::vector<std::vector<RmseRecord>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        slots[i] = run_replication(config, task.n, task.m, task.replication);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const unsigned count =
        static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  SweepResult result;
  result.records.reserve(tasks.size() * config.lambda_grid.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!errors[i].empty()) {
      result.failures.push_back(
          {tasks[i].n, tasks[i].m, tasks[i].replication, errors[i]});
      continue;
    }
    result.records.insert(result.records.end(), slots[i].begin(), slots[i].end());
  }
  return result;
}

std::vector<CellMean> aggregate_mean(const std::vector<RmseRecord>& records) {
  std::vector<CellMean> cells;
  std::vector<double> sums;
  for (const RmseRecord& record : records) {
    bool found = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      CellMean& cell = cells[i];
      if (cell.model == record.model && cell.n == record.n && cell.m == record.m &&
          cell.lambda == record.lambda) {
        sums[i] += record.rmse;
        ++cell.count;
        found = true;
        break;
      }
    }
    if (!found) {
      cells.push_back({record.model, record.n, record.m, record.lambda, 0.0, 1});
      sums.push_back(record.rmse);
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    cells[i].mean_rmse = sums[i] / cells[i].count;
  return cells;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double value{};
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw std::invalid_argument("not a number: '" + t + "'");
  return value;
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> values;
  for (const std::string& token : split(text, ','))
    values.push_back(parse_integer<Index>(token, "grid entry"));
  return values;
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> values;
  for (const std::string& token : split(text, ',')) values.push_back(parse_double(token));
  return values;
}

namespace {
constexpr const char* kRecordHeader = "model,n,m,lambda,rep,seed,rmse";
}

void write_records(const std::vector<RmseRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_records: cannot open " + path);
  out << kRecordHeader << '\n';
  for (const RmseRecord& record : records) {
    out << static_cast<int>(record.model) << ',' << record.n << ',' << record.m
        << ',' << format_double(record.lambda) << ',' << record.replication << ','
        << record.seed << ',' << format_double(record.rmse) << '\n';
  }
  if (!out) throw std::runtime_error("write_records: write failed for " + path);
}

std::vector<RmseRecord> read_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_records: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || trim(line) != kRecordHeader)
    throw std::runtime_error("read_records: " + path + ":1: bad header");

  std::vector<RmseRecord> records;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string context = path + ":" + std::to_string(line_number);
    if (fields.size() != 7)
      throw std::runtime_error("read_records: " + context + ": expected 7 fields");
    try {
      RmseRecord record;
      record.model = parse_model(fields[0]);
      record.n = parse_integer<Index>(fields[1], "n");
      record.m = parse_integer<Index>(fields[2], "m");
      record.lambda = parse_double(fields[3]);
      record.replication = parse_integer<int>(fields[4], "rep");
      record.seed = parse_integer<std::uint64_t>(fields[5], "seed");
      record.rmse = parse_double(fields[6]);
      records.push_back(record);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("read_records: " + context + ": " + e.what());
    }
  }
  return records;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_config: cannot open " + path);

  ExperimentConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::string context = path + ":" + std::to_string(line_number);
    const auto pos = text.find('=');
    if (pos == std::string::npos)
      throw std::runtime_error("read_config: " + context + ": expected key=value");
    const std::string key = trim(text.substr(0, pos));
    const std::string value = trim(text.substr(pos + 1));
    try {
      if (key == "model")
        config.model = parse_model(value);
      else if (key == "n_grid")
        config.n_grid = parse_index_list(value);
      else if (key == "m_grid")
        config.m_grid = parse_index_list(value);
      else if (key == "lambda_grid")
        config.lambda_grid = parse_lambda_list(value);
      else if (key == "replications")
        config.replications = parse_integer<int>(value, "replications");
      else if (key == "master_seed")
        config.master_seed.master_seed =
            parse_integer<std::uint64_t>(value, "master_seed");
      else if (key == "output_path")
        config.output_path = value;
      else
        throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("read_config: " + context + ": " + e.what());
    }
  }
  return config;
}

void write_summary(std::ostream& out, const std::vector<CellMean>& means) {
  out << std::left << std::setw(7) << "model" << std::setw(7) << "n"
      << std::setw(7) << "m" << std::setw(10) << "lambda" << std::setw(6)
      << "reps" << "mean_rmse" << '\n';
  for (const CellMean& cell : means) {
    out << std::left << std::setw(7) << static_cast<int>(cell.model)
        << std::setw(7) << cell.n << std::setw(7) << cell.m << std::setw(10)
        << format_double(cell.lambda) << std::setw(6) << cell.count
        << format_double(cell.mean_rmse) << '\n';
  }
}

}  // namespace gssl
