#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gssl/experiment.hpp"
#include "gssl/kernel_graph.hpp"
#include "gssl/solvers.hpp"

using namespace gssl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() /
         (stem + "_" + std::to_string(::getpid()) + ".csv");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.model = SimModel::Model1;
  config.n_grid = {10};
  config.m_grid = {4};
  config.lambda_grid = {0.0, 0.1, kInf};
  config.replications = 6;
  config.master_seed = RngSeed{2024};
  return config;
}

}  // namespace

TEST_CASE("rmse formula") {
  VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, 1.0;
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(a, b) == doctest::Approx(1.0).epsilon(1e-15));

  VectorXd truth(2), est(2);
  truth << 0.2, 0.8;
  est << 0.5, 0.4;
  CHECK(rmse(truth, est) == doctest::Approx(0.35355339059327376).epsilon(1e-15));

  CHECK_THROWS_AS(rmse(a, VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(rmse(VectorXd(), VectorXd()), std::invalid_argument);
}

TEST_CASE("config validation") {
  ExperimentConfig config = small_config();
  CHECK_NOTHROW(config.validate());

  auto broken = config;
  broken.n_grid.clear();
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = config;
  broken.n_grid = {1};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = config;
  broken.m_grid = {0};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = config;
  broken.lambda_grid = {-0.5};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = config;
  broken.lambda_grid = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = config;
  broken.replications = 0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("run_replication is deterministic and dispatch-stable") {
  const ExperimentConfig config = small_config();
  const auto first = run_replication(config, 10, 4, 2);
  const auto second = run_replication(config, 10, 4, 2);
  REQUIRE(first.size() == 3);
  CHECK(first == second);

  // The same lambda listed twice gives the same rmse both times.
  auto doubled = config;
  doubled.lambda_grid = {0.0, 0.0};
  const auto records = run_replication(doubled, 10, 4, 0);
  CHECK(records[0].rmse == records[1].rmse);

  CHECK(first[0].lambda == 0.0);
  CHECK(first[1].lambda == 0.1);
  CHECK(std::isinf(first[2].lambda));
  for (const auto& record : first) {
    CHECK(record.n == 10);
    CHECK(record.m == 4);
    CHECK(record.replication == 2);
    CHECK(record.rmse >= 0.0);
    CHECK(std::isfinite(record.rmse));
  }
}

TEST_CASE("run_replication matches an end-to-end recomputation") {
  ExperimentConfig config = small_config();
  config.n_grid = {10};
  config.m_grid = {5};
  config.lambda_grid = {0.0, 5.0};
  const Index n = 10, m = 5;
  const int rep = 0;
  const auto records = run_replication(config, n, m, rep);
  REQUIRE(records.size() == 2);

  // Recompute by driving the generator and solvers directly.
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

  const double hard_rmse = rmse(truth, solve_hard(graph, labels).values);
  const double soft_rmse = rmse(truth, solve_soft(graph, labels, 5.0).values);
  CHECK(records[0].rmse == hard_rmse);
  CHECK(records[1].rmse == soft_rmse);
  CHECK(records[0].seed ==
        derive_stream_seed(config.master_seed, rep, StreamRole::Inputs));
}

TEST_CASE("sweep cardinality and canonical ordering") {
  ExperimentConfig config = small_config();
  config.replications = 1;
  const auto result = sweep(config);
  CHECK(result.failures.empty());
  CHECK(result.records.size() == config.lambda_grid.size());

  config.n_grid = {10, 12};
  config.m_grid = {3, 4};
  config.replications = 2;
  const auto grid_result = sweep(config);
  REQUIRE(grid_result.records.size() == 2 * 2 * 2 * 3);
  std::size_t i = 0;
  for (Index n : config.n_grid)
    for (Index m : config.m_grid)
      for (int rep = 0; rep < 2; ++rep)
        for (double lambda : config.lambda_grid) {
          const RmseRecord& record = grid_result.records[i++];
          CHECK(record.n == n);
          CHECK(record.m == m);
          CHECK(record.replication == rep);
          const bool same_lambda =
              record.lambda == lambda || (std::isinf(record.lambda) && std::isinf(lambda));
          CHECK(same_lambda);
        }
}

TEST_CASE("sweep is deterministic across thread counts") {
  const ExperimentConfig config = small_config();
  const auto serial_a = sweep(config, 1);
  const auto serial_b = sweep(config, 1);
  const auto threaded = sweep(config, 4);
  CHECK(serial_a.records == serial_b.records);
  CHECK(serial_a.records == threaded.records);
}

TEST_CASE("aggregate_mean reduces per cell in first-appearance order") {
  std::vector<RmseRecord> records;
  records.push_back({SimModel::Model1, 10, 4, 0.0, 0, 1, 0.2});
  records.push_back({SimModel::Model1, 10, 4, 5.0, 0, 1, 0.5});
  records.push_back({SimModel::Model1, 10, 4, 0.0, 1, 2, 0.4});
  records.push_back({SimModel::Model1, 10, 4, 5.0, 1, 2, 0.7});
  const auto means = aggregate_mean(records);
  REQUIRE(means.size() == 2);
  CHECK(means[0].lambda == 0.0);
  CHECK(means[0].mean_rmse == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(means[0].count == 2);
  CHECK(means[1].lambda == 5.0);
  CHECK(means[1].mean_rmse == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("records round-trip through the CSV format") {
  std::vector<RmseRecord> records;
  records.push_back({SimModel::Model1, 10, 30, 0.0, 0, 123456789ULL, 0.123456789});
  records.push_back({SimModel::Model2, 1500, 30, 0.01, 7, 1ULL << 63, 1.0 / 3.0});
  records.push_back({SimModel::Model1, 100, 1000, kInf, 199, 42, 5e-324});

  const auto path = temp_file("gssl_records_roundtrip");
  write_records(records, path.string());
  const auto loaded = read_records(path.string());
  CHECK(loaded == records);

  const std::string text = slurp(path);
  CHECK(text.find("model,n,m,lambda,rep,seed,rmse\n") == 0);
  CHECK(text.find("inf") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("empty record list writes a header-only file") {
  const auto path = temp_file("gssl_records_empty");
  write_records({}, path.string());
  CHECK(slurp(path) == "model,n,m,lambda,rep,seed,rmse\n");
  CHECK(read_records(path.string()).empty());
  std::filesystem::remove(path);
}

TEST_CASE("read_records rejects malformed files") {
  const auto path = temp_file("gssl_records_bad");
  {
    std::ofstream out(path);
    out << "model,n,m\n";
  }
  CHECK_THROWS_WITH_AS(read_records(path.string()),
                       doctest::Contains("bad header"), std::runtime_error);
  {
    std::ofstream out(path);
    out << "model,n,m,lambda,rep,seed,rmse\n1,10,4,0.1,0\n";
  }
  CHECK_THROWS_WITH_AS(read_records(path.string()), doctest::Contains(":2:"),
                       std::runtime_error);
  {
    std::ofstream out(path);
    out << "model,n,m,lambda,rep,seed,rmse\n3,10,4,0.1,0,1,0.5\n";
  }
  CHECK_THROWS_AS(read_records(path.string()), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_records(path.string()), std::runtime_error);
}

TEST_CASE("config files parse with comments, spacing, and inf lambdas") {
  const auto path = temp_file("gssl_config");
  {
    std::ofstream out(path);
    out << "# sweep configuration\n"
        << "model = 2\n"
        << "n_grid = 10, 30, 100\n"
        << "m_grid=30\n"
        << "lambda_grid = 0, 0.01, 0.1, inf\n"
        << "replications = 12\n"
        << "master_seed = 99\n"
        << "output_path = out.csv\n";
  }
  const ExperimentConfig config = read_config(path.string());
  CHECK(config.model == SimModel::Model2);
  CHECK(config.n_grid == std::vector<Index>{10, 30, 100});
  CHECK(config.m_grid == std::vector<Index>{30});
  REQUIRE(config.lambda_grid.size() == 4);
  CHECK(config.lambda_grid[1] == 0.01);
  CHECK(std::isinf(config.lambda_grid[3]));
  CHECK(config.replications == 12);
  CHECK(config.master_seed.master_seed == 99);
  CHECK(config.output_path == "out.csv");

  {
    std::ofstream out(path);
    out << "bogus_key = 3\n";
  }
  CHECK_THROWS_WITH_AS(read_config(path.string()), doctest::Contains("bogus_key"),
                       std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("the full-scale n-sweep design is expressible as a config") {
  const auto path = temp_file("gssl_config_full");
  {
    std::ofstream out(path);
    out << "model = 1\n"
        << "n_grid = 10, 30, 50, 100, 200, 300, 500, 800, 1000, 1500\n"
        << "m_grid = 30\n"
        << "lambda_grid = 0, 0.01, 0.1, 5\n"
        << "replications = 1000\n"
        << "master_seed = 1\n"
        << "output_path = full_sweep.csv\n";
  }
  const ExperimentConfig config = read_config(path.string());
  CHECK_NOTHROW(config.validate());
  CHECK(config.n_grid ==
        std::vector<Index>{10, 30, 50, 100, 200, 300, 500, 800, 1000, 1500});
  CHECK(config.m_grid == std::vector<Index>{30});
  CHECK(config.lambda_grid == std::vector<double>{0.0, 0.01, 0.1, 5.0});
  CHECK(config.replications == 1000);
  std::filesystem::remove(path);
}

TEST_CASE("format_double writes shortest round-trip decimals") {
  for (double value : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, 0.123456789, 5e-324}) {
    const std::string text = format_double(value);
    CHECK(parse_double(text) == value);
  }
  CHECK(format_double(kInf) == "inf");
  CHECK(format_double(-kInf) == "-inf");
  CHECK(parse_double("inf") == kInf);
  CHECK(format_double(0.5) == "0.5");
  CHECK_THROWS_AS(parse_double("zebra"), std::invalid_argument);
  CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("summary table matches an independent aggregation") {
  ExperimentConfig config = small_config();
  config.replications = 3;
  const auto result = sweep(config);
  const auto means = aggregate_mean(result.records);

  std::ostringstream out;
  write_summary(out, means);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("mean_rmse") != std::string::npos);

  for (const CellMean& cell : means) {
    std::string line;
    REQUIRE(std::getline(lines, line));
    std::istringstream fields(line);
    int model = 0, reps = 0;
    Index n = 0, m = 0;
    std::string lambda, mean;
    fields >> model >> n >> m >> lambda >> reps >> mean;
    CHECK(model == static_cast<int>(cell.model));
    CHECK(n == cell.n);
    CHECK(m == cell.m);
    CHECK(parse_double(lambda) == cell.lambda);
    CHECK(reps == cell.count);
    CHECK(parse_double(mean) == cell.mean_rmse);
  }
}

TEST_CASE("grid cells of one replication share their leading draws") {
  // The stream derivation involves only (master seed, replication, role), so
  // a larger cell's dataset extends a smaller cell's: shared labeled block,
  // shared unlabeled prefix. This pairs cells for trend comparisons.
  ExperimentConfig config = small_config();
  config.lambda_grid = {0.0};
  const int rep = 1;

  auto dataset_of = [&](Index n, Index m) {
    auto inputs_rng = make_stream(config.master_seed, rep, StreamRole::Inputs);
    auto labels_rng = make_stream(config.master_seed, rep, StreamRole::Labels);
    const MatrixXd inputs = sample_truncated_mvn(inputs_rng, n + m);
    VectorXd probs(n);
    for (Index i = 0; i < n; ++i)
      probs(i) = true_probability(config.model, inputs.row(i));
    return std::pair<MatrixXd, VectorXd>(inputs, sample_labels(labels_rng, probs));
  };

  const auto [small_inputs, small_labels] = dataset_of(10, 4);
  const auto [large_inputs, large_labels] = dataset_of(10, 50);
  CHECK((large_inputs.topRows(14).array() == small_inputs.array()).all());
  CHECK((large_labels.array() == small_labels.array()).all());
}
