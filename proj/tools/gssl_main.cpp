// Command-line front end: `solve` scores unlabeled points on the similarity
// graph, `estimate` runs kernel regression, `simulate` sweeps the
// Monte-Carlo RMSE experiment. Exit codes: 0 success, 1 numerical failure,
// 2 usage or input error.

#include <cmath>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "gssl/datagen.hpp"
#include "gssl/experiment.hpp"
#include "gssl/kernel_graph.hpp"
#include "gssl/nadaraya_watson.hpp"
#include "gssl/solvers.hpp"
#include "input_file.hpp"

namespace {

struct PointArgs {
  std::string labeled_path;
  std::string unlabeled_path;
  double bandwidth = 0.0;
  bool bandwidth_set = false;
};

gssl::Dataset<double> load_dataset(const PointArgs& args, gssl::cli::LabeledPoints& labeled,
                                   double& bandwidth) {
  labeled = gssl::cli::read_labeled_points(args.labeled_path);
  const gssl::MatrixXd unlabeled = gssl::cli::read_points(args.unlabeled_path);
  if (unlabeled.cols() != labeled.inputs.cols())
    throw std::invalid_argument(
        "labeled file has " + std::to_string(labeled.inputs.cols()) +
        " feature columns but unlabeled file has " + std::to_string(unlabeled.cols()));

  if (args.bandwidth_set) {
    if (!(args.bandwidth > 0.0))
      throw std::invalid_argument("--bandwidth must be positive");
    bandwidth = args.bandwidth;
  } else {
    bandwidth = gssl::bandwidth(labeled.inputs.rows());  // schedule from n
  }

  gssl::MatrixXd all(labeled.inputs.rows() + unlabeled.rows(), unlabeled.cols());
  all << labeled.inputs, unlabeled;
  return gssl::Dataset<double>(std::move(all), labeled.labels);
}

int run_solve(const PointArgs& args, const std::string& lambda_text) {
  const double lambda = gssl::parse_double(lambda_text);
  if (std::isnan(lambda) || lambda < 0.0)
    throw std::invalid_argument("--lambda must be >= 0 or inf");

  gssl::cli::LabeledPoints labeled;
  double bandwidth = 0.0;
  const auto data = load_dataset(args, labeled, bandwidth);
  const auto graph = gssl::build_graph(data, gssl::KernelSpec<double>(bandwidth));
  const auto scores = gssl::solve(graph, labeled.labels, lambda);
  for (gssl::Index a = 0; a < scores.values.size(); ++a)
    std::cout << gssl::format_double(scores.values(a)) << '\n';
  return 0;
}

int run_estimate(const PointArgs& args) {
  gssl::cli::LabeledPoints labeled;
  double bandwidth = 0.0;
  const auto data = load_dataset(args, labeled, bandwidth);
  const auto scores = gssl::nw_batch(data, gssl::KernelSpec<double>(bandwidth));
  for (gssl::Index a = 0; a < scores.values.size(); ++a)
    std::cout << gssl::format_double(scores.values(a)) << '\n';
  return 0;
}

struct SimulateArgs {
  std::string config_path;
  int model = 1;
  std::string n_grid;
  std::string m_grid;
  std::string lambda_grid;
  int replications = 200;
  std::uint64_t seed = 0;
  std::string output_path;
  unsigned threads = 0;
};

int run_simulate(const CLI::App& cmd, const SimulateArgs& args) {
  gssl::ExperimentConfig config;
  if (!args.config_path.empty()) config = gssl::read_config(args.config_path);

  // Inline flags override the config file.
  if (cmd.count("--model")) config.model = static_cast<gssl::SimModel>(args.model);
  if (cmd.count("--n-grid")) config.n_grid = gssl::parse_index_list(args.n_grid);
  if (cmd.count("--m-grid")) config.m_grid = gssl::parse_index_list(args.m_grid);
  if (cmd.count("--lambda-grid"))
    config.lambda_grid = gssl::parse_lambda_list(args.lambda_grid);
  if (cmd.count("--reps")) config.replications = args.replications;
  if (cmd.count("--seed")) config.master_seed.master_seed = args.seed;
  if (cmd.count("--out")) config.output_path = args.output_path;

  if (config.output_path.empty())
    throw std::invalid_argument("an output path is required (--out or output_path)");
  config.validate();

  const unsigned threads =
      args.threads > 0 ? args.threads : std::max(1u, std::thread::hardware_concurrency());
  const gssl::SweepResult result = gssl::sweep(config, threads);

  gssl::write_records(result.records, config.output_path);
  gssl::write_summary(std::cout, gssl::aggregate_mean(result.records));

  if (!result.failures.empty()) {
    for (const auto& failure : result.failures)
      std::cerr << "failed cell: n=" << failure.n << " m=" << failure.m
                << " rep=" << failure.replication << ": " << failure.message << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transductive scoring on similarity graphs"};
  app.require_subcommand(1);

  PointArgs points;
  auto add_point_flags = [&points](CLI::App* cmd) {
    cmd->add_option("--labeled", points.labeled_path,
                    "CSV of labeled points: feature columns plus a trailing label column")
        ->required();
    cmd->add_option("--unlabeled", points.unlabeled_path,
                    "CSV of unlabeled points: feature columns only")
        ->required();
    cmd->add_option("--bandwidth", points.bandwidth,
                    "Kernel bandwidth; defaults to (ln n / n)^(1/5)");
  };

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Score unlabeled points on the similarity graph");
  add_point_flags(solve_cmd);
  std::string lambda_text = "0";
  solve_cmd->add_option("--lambda", lambda_text,
                        "Regularization weight: 0 (hard criterion), a positive "
                        "value, or inf");

  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "Kernel-regression estimates at unlabeled points");
  add_point_flags(estimate_cmd);

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte-Carlo RMSE sweep over (n, m, lambda)");
  SimulateArgs sim;
  simulate_cmd->add_option("--config", sim.config_path, "key=value config file");
  simulate_cmd->add_option("--model", sim.model, "Simulation model, 1 or 2")
      ->check(CLI::Range(1, 2));
  simulate_cmd->add_option("--n-grid", sim.n_grid, "Comma-separated labeled sizes");
  simulate_cmd->add_option("--m-grid", sim.m_grid, "Comma-separated unlabeled sizes");
  simulate_cmd->add_option("--lambda-grid", sim.lambda_grid,
                           "Comma-separated lambdas; inf allowed");
  simulate_cmd->add_option("--reps", sim.replications, "Replications per cell");
  simulate_cmd->add_option("--seed", sim.seed, "Master seed");
  simulate_cmd->add_option("--out", sim.output_path, "Records CSV destination");
  simulate_cmd->add_option("--threads", sim.threads,
                           "Worker threads (0 = hardware concurrency)");

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) {
      points.bandwidth_set = solve_cmd->count("--bandwidth") > 0;
      return run_solve(points, lambda_text);
    }
    if (estimate_cmd->parsed()) {
      points.bandwidth_set = estimate_cmd->count("--bandwidth") > 0;
      return run_estimate(points);
    }
    return run_simulate(*simulate_cmd, sim);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const gssl::SingularSystemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const gssl::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const gssl::EmptyNeighborhoodError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
