// Command-line front end: simulate / fit / calibrate / predict / evaluate /
// aggregate / benchmark-remark1 / sweep. Exit codes: 0 success, 2 input or
// validation error, 1 runtime failure.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "confset/dataset.hpp"
#include "confset/erm.hpp"
#include "confset/error.hpp"
#include "confset/gaussian_mixture.hpp"
#include "confset/learners.hpp"
#include "confset/pipeline.hpp"
#include "confset/serialization.hpp"
#include "confset/superlearner.hpp"

namespace {

using namespace confset;

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) values.push_back(std::stod(token));
  }
  if (values.empty()) throw ValidationError("empty list: '" + text + "'");
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const double value : parse_real_list(text)) values.push_back(static_cast<int>(value));
  return values;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot open for writing: " + path);
  file << content;
}

struct SimulateOptions {
  int class_count = 10;
  int dimension = 10;
  double means_low = 0.0;
  double means_high = 4.0;
  int count = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string means_out;
  std::string means_in;
};

void run_simulate(const SimulateOptions& options) {
  GaussianMixtureModel model;
  Rng root(RandomSeed{options.seed});
  if (!options.means_in.empty()) {
    model.means = load_unlabeled_csv(options.means_in, "class").features;
  } else {
    model = uniform_means_model(options.class_count, options.dimension, options.means_low,
                                options.means_high, root.derive(1).seed());
  }
  const LabeledDataset data = sample_mixture(model, options.count, root.derive(2).seed());
  write_labeled_csv(data, options.out);
  if (!options.means_out.empty()) {
    LabeledDataset means_table;
    means_table.features = model.means;
    means_table.labels.resize(model.class_count());
    means_table.class_count = model.class_count();
    for (int k = 0; k < model.class_count(); ++k) means_table.labels[k] = k + 1;
    write_labeled_csv(means_table, options.means_out, "class");
  }
  std::cout << "wrote " << data.n() << " rows (" << data.d() << " features, "
            << data.class_count << " classes) to " << options.out << '\n';
}

struct FitOptions {
  std::string data_path;
  std::string label_column = "label";
  int class_count_override = 0;
  std::string learner = "erm";
  std::string loss = "logistic";
  double clamp_bound = 5.0;
  int max_iters = 10000;
  double tol = 1e-8;
  int k = 11;
  std::uint64_t seed = 0;
  std::string out;
};

void run_fit(const FitOptions& options) {
  const LabeledDataset data =
      load_labeled_csv(options.data_path, options.label_column, options.class_count_override);
  ScoreAlgorithm algorithm = ScoreAlgorithm::from_name(options.learner);
  algorithm.k = options.k;
  algorithm.erm.loss = Loss::from_name(options.loss);
  algorithm.erm.clamp_bound = options.clamp_bound;
  algorithm.erm.max_iterations = options.max_iters;
  algorithm.erm.relative_tolerance = options.tol;
  const auto model = algorithm.fit(data);
  save_score_model(*model, options.out);
  std::cout << "fitted " << model->kind() << " on " << data.n() << " rows; saved to "
            << options.out << '\n';
}

struct CalibrateOptions {
  std::string model_path;
  std::string data_path;
  std::string drop_column = "label";
  double beta = 2.0;
  bool jitter = false;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_calibrate(const CalibrateOptions& options) {
  if (options.jitter && !options.seed.has_value()) {
    throw ValidationError("--jitter requires --seed (it keys the tie-breaking noise)");
  }
  auto model = load_score_model(options.model_path);
  const UnlabeledDataset pool = load_unlabeled_csv(options.data_path, options.drop_column);
  const auto predictor = calibrate(std::move(model), pool, options.beta, options.jitter,
                                   options.seed.value_or(0));
  save_predictor(predictor, options.out);
  std::cout << "calibrated at beta=" << options.beta << " on " << pool.n()
            << " pool rows; saved to " << options.out << '\n';
}

struct PredictOptions {
  std::string predictor_path;
  std::string data_path;
  std::string drop_column = "label";
  std::string out;
};

void run_predict(const PredictOptions& options) {
  const ConfidenceSetPredictor predictor = load_predictor(options.predictor_path);
  const UnlabeledDataset queries = load_unlabeled_csv(options.data_path, options.drop_column);
  const auto memberships = predict_memberships(predictor, queries.features);
  std::ostringstream out;
  out << "row,set_size,members\n";
  for (int i = 0; i < memberships.rows(); ++i) {
    std::string joined;
    int size = 0;
    for (int k = 0; k < memberships.cols(); ++k) {
      if (memberships(i, k)) {
        if (!joined.empty()) joined += ';';
        joined += std::to_string(k + 1);
        ++size;
      }
    }
    out << (i + 1) << ',' << size << ',' << joined << '\n';
  }
  write_text_file(options.out, out.str());
  std::cout << "predicted sets for " << memberships.rows() << " rows; wrote " << options.out
            << '\n';
}

struct EvaluateOptions {
  std::string predictor_path;
  std::string data_path;
  std::string label_column = "label";
  std::string betas;
  std::string out;
};

void run_evaluate(const EvaluateOptions& options) {
  const ConfidenceSetPredictor predictor = load_predictor(options.predictor_path);
  const LabeledDataset test = load_labeled_csv(options.data_path, options.label_column,
                                               predictor.score_model->class_count());
  std::vector<double> sweep;
  if (!options.betas.empty()) {
    sweep = parse_real_list(options.betas);
    for (const double beta : sweep) {
      if (!(beta > 0.0 && beta < predictor.score_model->class_count())) {
        throw ValidationError("sweep beta must lie in (0, K)");
      }
    }
  }
  const EvaluationReport report = evaluate(predictor, test, sweep);
  std::cout << report.to_text();
  if (!options.out.empty()) write_text_file(options.out, report.to_csv());
}

struct AggregateOptions {
  std::string data_path;
  std::string label_column = "label";
  int class_count_override = 0;
  std::string learners = "softmax,knn,gaussian";
  int folds = 5;
  std::string loss = "boosting";
  std::string weight_mode = "continuous";
  int grid_resolution = 100;
  bool fold_models = false;
  std::uint64_t seed = 0;
  std::string out;
};

void run_aggregate(const AggregateOptions& options) {
  const LabeledDataset data =
      load_labeled_csv(options.data_path, options.label_column, options.class_count_override);
  const auto algorithms = parse_algorithm_list(options.learners);
  AggregationConfig config;
  config.folds = options.folds;
  config.loss = Loss::from_name(options.loss);
  config.grid_resolution = options.grid_resolution;
  config.aggregate_fold_models = options.fold_models;
  if (options.weight_mode == "continuous") {
    config.mode = WeightMode::continuous;
  } else if (options.weight_mode == "grid") {
    config.mode = WeightMode::grid;
  } else {
    throw ValidationError("unknown weight mode '" + options.weight_mode + "'");
  }
  const auto result = fit_aggregated_model(data, algorithms, config, RandomSeed{options.seed});
  save_score_model(*result.model, options.out);
  std::cout << "aggregate cv risk " << result.aggregate_cv_risk << "; weights";
  for (int m = 0; m < result.weights.weights.size(); ++m) {
    std::cout << ' ' << algorithms[m].name() << '=' << result.weights.weights(m);
  }
  std::cout << "; saved to " << options.out << '\n';
}

struct BenchmarkOptions {
  std::uint64_t seed = 0;
  std::string out_prefix;
  bool skip_superlearner = false;
};

void run_benchmark(const BenchmarkOptions& options) {
  BenchmarkConfig config;
  config.include_superlearner = !options.skip_superlearner;
  const BenchmarkReport report = run_remark1_benchmark(RandomSeed{options.seed}, config);
  std::cout << report.to_text();
  if (!options.out_prefix.empty()) {
    write_text_file(options.out_prefix + ".csv", report.to_csv());
    write_text_file(options.out_prefix + ".txt", report.to_text());
  }
}

struct SweepOptions {
  std::string n_list = "100,1000,10000";
  std::string pool_list = "100,1000,10000";
  int replicates = 10;
  std::uint64_t seed = 0;
  std::string out;
};

void run_sweep(const SweepOptions& options) {
  const SweepReport report =
      consistency_sweep(parse_int_list(options.n_list), parse_int_list(options.pool_list),
                        RandomSeed{options.seed}, options.replicates);
  std::cout << report.to_text();
  if (!options.out.empty()) write_text_file(options.out, report.to_csv());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-valued classification with expected-size control"};
  app.require_subcommand(1);

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Sample a Gaussian-mixture dataset to CSV");
  simulate_cmd->add_option("--k", simulate.class_count, "Number of classes");
  simulate_cmd->add_option("--dim", simulate.dimension, "Feature dimension");
  simulate_cmd->add_option("--means-low", simulate.means_low, "Lower bound of mean coordinates");
  simulate_cmd->add_option("--means-high", simulate.means_high, "Upper bound of mean coordinates");
  simulate_cmd->add_option("--count", simulate.count, "Rows to sample");
  simulate_cmd->add_option("--seed", simulate.seed, "Random seed")->required();
  simulate_cmd->add_option("--out", simulate.out, "Output CSV path")->required();
  simulate_cmd->add_option("--means-out", simulate.means_out, "Optional CSV for the drawn means");
  simulate_cmd->add_option("--means-in", simulate.means_in,
                           "Reuse means from CSV instead of drawing them");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a score model on labeled CSV data");
  fit_cmd->add_option("--data", fit.data_path, "Labeled CSV")->required();
  fit_cmd->add_option("--label-column", fit.label_column, "Label column name");
  fit_cmd->add_option("--classes", fit.class_count_override,
                      "Class count override (default: max observed label)");
  fit_cmd->add_option("--learner", fit.learner, "softmax, knn, gaussian or erm");
  fit_cmd->add_option("--loss", fit.loss, "boosting, logistic or squared (erm)");
  fit_cmd->add_option("--clamp-bound", fit.clamp_bound, "Score clamp bound (erm)");
  fit_cmd->add_option("--max-iters", fit.max_iters, "Iteration cap (erm)");
  fit_cmd->add_option("--tol", fit.tol, "Relative tolerance (erm)");
  fit_cmd->add_option("--knn-k", fit.k, "Neighbor count (knn)");
  fit_cmd->add_option("--out", fit.out, "Output model path")->required();

  CalibrateOptions calibrate_options;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Build a set predictor from a model and unlabeled CSV");
  calibrate_cmd->add_option("--model", calibrate_options.model_path, "Fitted model")->required();
  calibrate_cmd->add_option("--data", calibrate_options.data_path, "Unlabeled CSV")->required();
  calibrate_cmd->add_option("--drop-column", calibrate_options.drop_column,
                            "Column to ignore if present (default: label)");
  calibrate_cmd->add_option("--beta", calibrate_options.beta, "Target expected set size")
      ->required();
  calibrate_cmd->add_flag("--jitter", calibrate_options.jitter,
                          "Break score ties with seeded hash noise");
  calibrate_cmd->add_option("--seed", calibrate_options.seed, "Seed (required with --jitter)");
  calibrate_cmd->add_option("--out", calibrate_options.out, "Output predictor path")->required();

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "Emit label sets for query rows");
  predict_cmd->add_option("--predictor", predict.predictor_path, "Calibrated predictor")
      ->required();
  predict_cmd->add_option("--data", predict.data_path, "Query CSV")->required();
  predict_cmd->add_option("--drop-column", predict.drop_column,
                          "Column to ignore if present (default: label)");
  predict_cmd->add_option("--out", predict.out, "Output CSV path")->required();

  EvaluateOptions evaluate_options;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Risk and information on labeled data");
  evaluate_cmd->add_option("--predictor", evaluate_options.predictor_path, "Calibrated predictor")
      ->required();
  evaluate_cmd->add_option("--data", evaluate_options.data_path, "Labeled CSV")->required();
  evaluate_cmd->add_option("--label-column", evaluate_options.label_column, "Label column name");
  evaluate_cmd->add_option("--betas", evaluate_options.betas,
                           "Optional comma list for a beta sweep");
  evaluate_cmd->add_option("--out", evaluate_options.out, "Optional CSV report path");

  AggregateOptions aggregate;
  auto* aggregate_cmd =
      app.add_subcommand("aggregate", "Cross-validated convex aggregation of learners");
  aggregate_cmd->add_option("--data", aggregate.data_path, "Labeled CSV")->required();
  aggregate_cmd->add_option("--label-column", aggregate.label_column, "Label column name");
  aggregate_cmd->add_option("--classes", aggregate.class_count_override, "Class count override");
  aggregate_cmd->add_option("--learners", aggregate.learners, "Comma list of learners");
  aggregate_cmd->add_option("--folds", aggregate.folds, "Fold count V");
  aggregate_cmd->add_option("--loss", aggregate.loss, "Surrogate loss");
  aggregate_cmd->add_option("--weight-mode", aggregate.weight_mode, "continuous or grid");
  aggregate_cmd->add_option("--grid-resolution", aggregate.grid_resolution,
                            "Lattice steps in grid mode");
  aggregate_cmd->add_flag("--fold-models", aggregate.fold_models,
                          "Aggregate fold-trained models instead of full refits");
  aggregate_cmd->add_option("--seed", aggregate.seed, "Random seed (fold shuffle)")->required();
  aggregate_cmd->add_option("--out", aggregate.out, "Output model path")->required();

  BenchmarkOptions benchmark;
  auto* benchmark_cmd = app.add_subcommand(
      "benchmark-remark1", "Synthetic benchmark: oracle vs max vs fitted pipelines");
  benchmark_cmd->add_option("--seed", benchmark.seed, "Random seed")->required();
  benchmark_cmd->add_option("--out-prefix", benchmark.out_prefix,
                            "Write <prefix>.csv and <prefix>.txt");
  benchmark_cmd->add_flag("--skip-superlearner", benchmark.skip_superlearner,
                          "Skip the aggregated pipeline (faster)");

  SweepOptions sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Excess risk and information deviation over (n, N)");
  sweep_cmd->add_option("--n-list", sweep.n_list, "Comma list of training sizes");
  sweep_cmd->add_option("--pool-list", sweep.pool_list, "Comma list of calibration sizes");
  sweep_cmd->add_option("--replicates", sweep.replicates, "Replicates per cell");
  sweep_cmd->add_option("--seed", sweep.seed, "Random seed")->required();
  sweep_cmd->add_option("--out", sweep.out, "Optional CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;  // parse problems are input errors
  }

  try {
    if (simulate_cmd->parsed()) run_simulate(simulate);
    if (fit_cmd->parsed()) run_fit(fit);
    if (calibrate_cmd->parsed()) run_calibrate(calibrate_options);
    if (predict_cmd->parsed()) run_predict(predict);
    if (evaluate_cmd->parsed()) run_evaluate(evaluate_options);
    if (aggregate_cmd->parsed()) run_aggregate(aggregate);
    if (benchmark_cmd->parsed()) run_benchmark(benchmark);
    if (sweep_cmd->parsed()) run_sweep(sweep);
  } catch (const confset::ValidationError& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "runtime failure: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
