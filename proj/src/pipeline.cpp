#include "confset/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "confset/erm.hpp"
#include "confset/error.hpp"

namespace confset {

ConfidenceSetPredictor::ConfidenceSetPredictor(const ConfidenceSetPredictor& other)
    : score_model(other.score_model ? other.score_model->clone() : nullptr),
      calibrator(other.calibrator),
      beta(other.beta),
      jitter(other.jitter),
      jitter_salt(other.jitter_salt) {}

ConfidenceSetPredictor calibrate(std::unique_ptr<ScoreModel> score_model,
                                 const UnlabeledDataset& unlabeled, double beta, bool jitter,
                                 std::uint64_t jitter_salt) {
  if (!score_model) throw ValidationError("null score model");
  if (unlabeled.n() < 1) throw ValidationError("empty calibration pool");
  if (unlabeled.d() != score_model->dimension()) {
    throw ValidationError("calibration pool has " + std::to_string(unlabeled.d()) +
                          " features, model expects " +
                          std::to_string(score_model->dimension()));
  }
  const int K = score_model->class_count();
  if (!(beta > 0.0 && beta < K)) {
    throw ValidationError("beta must lie in the open interval (0, " + std::to_string(K) +
                          "), got " + std::to_string(beta));
  }
  Eigen::MatrixXd pool_scores = score_model->scores(unlabeled.features);
  if (jitter) pool_scores = jitter_scores(pool_scores, jitter_salt);

  ConfidenceSetPredictor predictor;
  predictor.score_model = std::move(score_model);
  predictor.calibrator = build_empirical_g(ScorePool{std::move(pool_scores)});
  predictor.beta = beta;
  predictor.jitter = jitter;
  predictor.jitter_salt = jitter_salt;
  return predictor;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> predict_memberships(
    const ConfidenceSetPredictor& predictor, const Eigen::MatrixXd& X) {
  if (!predictor.score_model) throw ValidationError("predictor has no score model");
  if (X.cols() != predictor.score_model->dimension()) {
    throw ValidationError("query has " + std::to_string(X.cols()) +
                          " features, model expects " +
                          std::to_string(predictor.score_model->dimension()));
  }
  Eigen::MatrixXd scores = predictor.score_model->scores(X);
  if (predictor.jitter) scores = jitter_scores(scores, predictor.jitter_salt);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> memberships(X.rows(), scores.cols());
  for (int i = 0; i < scores.rows(); ++i) {
    for (int k = 0; k < scores.cols(); ++k) {
      memberships(i, k) = predictor.calibrator.g_value(scores(i, k)) <= predictor.beta;
    }
  }
  return memberships;
}

LabelSet predict_set(const ConfidenceSetPredictor& predictor, const Eigen::VectorXd& x) {
  const auto memberships = predict_memberships(predictor, x.transpose());
  LabelSet set;
  for (int k = 0; k < memberships.cols(); ++k) {
    if (memberships(0, k)) set.members.push_back(k + 1);
  }
  return set;
}

namespace {

BetaRow evaluate_at_beta(const ConfidenceSetPredictor& predictor, const Eigen::MatrixXd& scores,
                         const LabeledDataset& test, double beta) {
  BetaRow row;
  row.beta = beta;
  std::int64_t misses = 0, total_size = 0, empty = 0;
  for (int i = 0; i < scores.rows(); ++i) {
    int size = 0;
    bool hit = false;
    for (int k = 0; k < scores.cols(); ++k) {
      if (predictor.calibrator.g_value(scores(i, k)) <= beta) {
        ++size;
        if (test.labels[i] == k + 1) hit = true;
      }
    }
    if (!hit) ++misses;
    if (size == 0) ++empty;
    total_size += size;
  }
  row.risk = static_cast<double>(misses) / test.n();
  row.information = static_cast<double>(total_size) / test.n();
  row.empty_set_fraction = static_cast<double>(empty) / test.n();
  return row;
}

std::string format_real(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

}  // namespace

EvaluationReport evaluate(const ConfidenceSetPredictor& predictor, const LabeledDataset& test,
                          const std::vector<double>& beta_sweep) {
  test.validate();
  if (!predictor.score_model) throw ValidationError("predictor has no score model");
  Eigen::MatrixXd scores = predictor.score_model->scores(test.features);
  if (predictor.jitter) scores = jitter_scores(scores, predictor.jitter_salt);

  EvaluationReport report;
  report.beta_target = predictor.beta;
  report.n_test = test.n();
  const BetaRow main = evaluate_at_beta(predictor, scores, test, predictor.beta);
  report.risk = main.risk;
  report.information = main.information;
  report.empty_set_fraction = main.empty_set_fraction;
  for (const double beta : beta_sweep) {
    report.per_beta_rows.push_back(evaluate_at_beta(predictor, scores, test, beta));
  }
  return report;
}

std::string EvaluationReport::to_csv() const {
  std::ostringstream out;
  out << "beta,risk,information,empty_set_fraction,n_test\n";
  const auto line = [&](const BetaRow& row) {
    out << format_real(row.beta) << ',' << format_real(row.risk) << ','
        << format_real(row.information) << ',' << format_real(row.empty_set_fraction) << ','
        << n_test << '\n';
  };
  if (per_beta_rows.empty()) {
    line(BetaRow{beta_target, risk, information, empty_set_fraction});
  } else {
    for (const auto& row : per_beta_rows) line(row);
  }
  return out.str();
}

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "  beta    risk    info   empty  (n_test=" << n_test << ")\n";
  const auto line = [&](const BetaRow& row) {
    out << std::setw(6) << row.beta << "  " << std::setw(6) << row.risk << "  " << std::setw(6)
        << row.information << "  " << std::setw(6) << row.empty_set_fraction << '\n';
  };
  if (per_beta_rows.empty()) {
    line(BetaRow{beta_target, risk, information, empty_set_fraction});
  } else {
    for (const auto& row : per_beta_rows) line(row);
  }
  return out.str();
}

std::string BenchmarkReport::to_csv() const {
  std::ostringstream out;
  out << "method,risk,information\n";
  for (const auto& row : rows) {
    out << row.method << ',' << format_real(row.risk) << ',' << format_real(row.information)
        << '\n';
  }
  return out.str();
}

std::string BenchmarkReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::setw(16) << "method" << std::setw(10) << "risk" << std::setw(10) << "info" << '\n';
  for (const auto& row : rows) {
    out << std::setw(16) << row.method << std::setw(10) << row.risk << std::setw(10)
        << row.information << '\n';
  }
  out << "mc standard error " << std::setprecision(6) << mc_standard_error << '\n';
  return out.str();
}

BenchmarkReport run_remark1_benchmark(RandomSeed seed, const BenchmarkConfig& config) {
  Rng root(seed);
  const GaussianMixtureModel model = benchmark_design(root.derive(1).seed());
  const EmpiricalG g_true = build_true_g(model, config.pool_size, root.derive(2).seed());
  const LabeledDataset test = sample_mixture(model, config.test_size, root.derive(3).seed());
  const Eigen::MatrixXd test_probs = posterior_matrix(model, test.features);
  const double beta = config.beta;
  const int top = static_cast<int>(std::lround(beta));

  BenchmarkReport report;
  report.oracle_threshold = g_true.g_inverse(beta);

  const auto tally = [&](const std::string& method, const auto& member) {
    std::int64_t misses = 0, total_size = 0;
    for (int i = 0; i < test.n(); ++i) {
      int size = 0;
      bool hit = false;
      for (int k = 1; k <= model.class_count(); ++k) {
        if (member(i, k)) {
          ++size;
          if (test.labels[i] == k) hit = true;
        }
      }
      if (!hit) ++misses;
      total_size += size;
    }
    BenchmarkRow row;
    row.method = method;
    row.risk = static_cast<double>(misses) / test.n();
    row.information = static_cast<double>(total_size) / test.n();
    report.rows.push_back(row);
    return row.risk;
  };

  const double oracle_risk = tally("oracle", [&](int i, int k) {
    return g_true.g_value(test_probs(i, k - 1)) <= beta;
  });
  report.mc_standard_error = std::sqrt(oracle_risk * (1.0 - oracle_risk) / test.n());

  {
    std::vector<LabelSet> top_sets(test.n());
    for (int i = 0; i < test.n(); ++i) top_sets[i] = max_set(test_probs.row(i), top);
    tally("max", [&](int i, int k) { return top_sets[i].contains(k); });
  }

  const LabeledDataset train = sample_mixture(model, config.train_size, root.derive(4).seed());
  const LabeledDataset pool = sample_mixture(model, config.calibration_size, root.derive(5).seed());
  const UnlabeledDataset calibration{pool.features};

  {
    ErmConfig erm_config;
    erm_config.loss = Loss(LossKind::logistic);
    auto fitted = std::make_unique<AffineScoreModel>(fit_erm(train, erm_config, root.derive(6).seed()));
    const auto predictor = calibrate(std::move(fitted), calibration, beta);
    const auto memberships = predict_memberships(predictor, test.features);
    tally("empirical", [&](int i, int k) { return memberships(i, k - 1); });
  }

  if (config.include_superlearner) {
    std::vector<ScoreAlgorithm> library = {ScoreAlgorithm::from_name("softmax"),
                                           ScoreAlgorithm::from_name("knn"),
                                           ScoreAlgorithm::from_name("gaussian")};
    AggregationConfig aggregation;
    auto aggregated = fit_aggregated_model(train, library, aggregation, root.derive(7).seed());
    const auto predictor =
        calibrate(std::move(aggregated.model), calibration, beta);
    const auto memberships = predict_memberships(predictor, test.features);
    tally("superlearner", [&](int i, int k) { return memberships(i, k - 1); });
  }
  return report;
}

std::string SweepReport::to_csv() const {
  std::ostringstream out;
  out << "n,pool_size,mean_excess_risk,mean_information_deviation\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.pool_size << ',' << format_real(row.mean_excess_risk) << ','
        << format_real(row.mean_information_deviation) << '\n';
  }
  return out.str();
}

std::string SweepReport::to_text() const {
  std::ostringstream out;
  out << std::setw(8) << "n" << std::setw(8) << "N" << std::setw(16) << "excess-risk"
      << std::setw(16) << "|info-beta|" << '\n';
  out << std::fixed << std::setprecision(5);
  for (const auto& row : rows) {
    out << std::setw(8) << row.n << std::setw(8) << row.pool_size << std::setw(16)
        << row.mean_excess_risk << std::setw(16) << row.mean_information_deviation << '\n';
  }
  return out.str();
}

SweepReport consistency_sweep(const std::vector<int>& n_list, const std::vector<int>& pool_list,
                              RandomSeed seed, int replicates, double beta, int test_size) {
  if (n_list.empty() || pool_list.empty()) throw ValidationError("empty sweep list");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      !std::is_sorted(pool_list.begin(), pool_list.end())) {
    throw ValidationError("sweep lists must be increasing");
  }
  if (replicates < 1) throw ValidationError("replicates must be >= 1");

  Rng root(seed);
  const GaussianMixtureModel model = benchmark_design(root.derive(1).seed());
  const EmpiricalG g_true = build_true_g(model, 1000000, root.derive(2).seed());

  SweepReport report;
  report.beta = beta;
  report.replicates = replicates;
  ErmConfig erm_config;
  erm_config.loss = Loss(LossKind::logistic);
  erm_config.relative_tolerance = 1e-6;
  erm_config.max_iterations = 1500;

  std::uint64_t stream = 10;
  for (const int n : n_list) {
    for (const int pool_size : pool_list) {
      double excess_total = 0.0;
      double deviation_total = 0.0;
      for (int replicate = 0; replicate < replicates; ++replicate) {
        Rng lane = root.derive(stream++);
        const LabeledDataset train = sample_mixture(model, n, lane.derive(1).seed());
        const LabeledDataset pool = sample_mixture(model, pool_size, lane.derive(2).seed());
        const LabeledDataset test = sample_mixture(model, test_size, lane.derive(3).seed());

        const auto fitted = std::make_unique<AffineScoreModel>(
            fit_erm(train, erm_config, lane.derive(4).seed()));
        const auto predictor =
            calibrate(fitted->clone(), UnlabeledDataset{pool.features}, beta);
        const auto memberships = predict_memberships(predictor, test.features);

        const Eigen::MatrixXd test_probs = posterior_matrix(model, test.features);
        std::int64_t misses = 0, oracle_misses = 0, total_size = 0;
        for (int i = 0; i < test.n(); ++i) {
          if (!memberships(i, test.labels[i] - 1)) ++misses;
          if (g_true.g_value(test_probs(i, test.labels[i] - 1)) > beta) ++oracle_misses;
          for (int k = 0; k < model.class_count(); ++k) {
            if (memberships(i, k)) ++total_size;
          }
        }
        excess_total += static_cast<double>(misses - oracle_misses) / test.n();
        deviation_total += std::abs(static_cast<double>(total_size) / test.n() - beta);
      }
      SweepRow row;
      row.n = n;
      row.pool_size = pool_size;
      row.mean_excess_risk = excess_total / replicates;
      row.mean_information_deviation = deviation_total / replicates;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace confset
