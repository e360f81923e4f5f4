// Acceptance battery: one check per shipped guarantee, each printing a single
// [PASS]/[FAIL]/[SKIP] line with the measured numbers. Run without arguments
// for every check, or pass check numbers (1-9) to run a subset. Exit code 0
// means every executed check passed or was skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "confset/calibration.hpp"
#include "confset/dataset.hpp"
#include "confset/erm.hpp"
#include "confset/error.hpp"
#include "confset/gaussian_mixture.hpp"
#include "confset/learners.hpp"
#include "confset/loss.hpp"
#include "confset/pipeline.hpp"
#include "confset/rng.hpp"
#include "confset/superlearner.hpp"

namespace {

using namespace confset;

struct Outcome {
  enum class Status { pass, fail, skip };
  Status status = Status::fail;
  std::string detail;
};

Outcome pass(std::string detail) { return {Outcome::Status::pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Outcome::Status::fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Outcome::Status::skip, std::move(detail)}; }

std::string fmt(double value, int precision = 5) {
  std::ostringstream out;
  out << std::setprecision(precision) << value;
  return out.str();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean_set_size(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& memberships,
                     double* standard_error = nullptr) {
  const int rows = static_cast<int>(memberships.rows());
  double total = 0.0, total_sq = 0.0;
  for (int i = 0; i < rows; ++i) {
    int size = 0;
    for (int k = 0; k < memberships.cols(); ++k) size += memberships(i, k) ? 1 : 0;
    total += size;
    total_sq += static_cast<double>(size) * size;
  }
  const double mean = total / rows;
  if (standard_error) {
    const double variance = std::max(0.0, total_sq / rows - mean * mean);
    *standard_error = std::sqrt(variance / rows);
  }
  return mean;
}

// ---------------------------------------------------------------------------
// Check 1: synthetic benchmark risk bands.
// Oracle rule risk 0.05 +- 0.02, top-2 rule risk 0.09 +- 0.02, the gap wider
// than 3 Monte Carlo standard errors, all inside a 2 minute budget.
// ---------------------------------------------------------------------------
Outcome check_benchmark_bands() {
  const auto start = std::chrono::steady_clock::now();
  BenchmarkConfig config;
  config.include_superlearner = false;
  const BenchmarkReport report = run_remark1_benchmark(RandomSeed{7}, config);
  const double seconds = elapsed_seconds(start);

  const double oracle_risk = report.rows[0].risk;
  const double max_risk = report.rows[1].risk;
  const double gap = max_risk - oracle_risk;
  const double gap_floor = 3.0 * report.mc_standard_error;

  std::ostringstream detail;
  detail << "oracle risk " << fmt(oracle_risk) << " (band 0.05+-0.02), top-2 risk "
         << fmt(max_risk) << " (band 0.09+-0.02), gap " << fmt(gap) << " vs floor "
         << fmt(gap_floor) << ", " << fmt(seconds, 3) << " s";

  const bool ok = std::abs(oracle_risk - 0.05) <= 0.02 && std::abs(max_risk - 0.09) <= 0.02 &&
                  gap > gap_floor && seconds < 120.0;
  return ok ? pass(detail.str()) : fail(detail.str());
}

// ---------------------------------------------------------------------------
// Check 2: held-out set size tracks the budget beta within 3K/sqrt(N) plus
// 3 test-sampling errors, for beta in {1,2,5} and pool sizes 100/1000/10000,
// and the mean deviation shrinks as the pool grows.
// ---------------------------------------------------------------------------
Outcome check_information_control() {
  Rng root(RandomSeed{202});
  const GaussianMixtureModel model = benchmark_design(root.derive(1).seed());
  const LabeledDataset train = sample_mixture(model, 2000, root.derive(2).seed());
  const auto score_model = fit_gaussian_generative(train);
  const double K = model.class_count();
  const int replicates = 5;

  std::uint64_t stream = 100;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const double beta : {1.0, 2.0, 5.0}) {
    double previous_mean = std::numeric_limits<double>::infinity();
    for (const int pool_size : {100, 1000, 10000}) {
      double deviation_total = 0.0;
      for (int replicate = 0; replicate < replicates; ++replicate) {
        Rng lane = root.derive(stream++);
        UnlabeledDataset pool;
        pool.features = sample_mixture(model, pool_size, lane.derive(1).seed()).features;
        const auto predictor = calibrate(score_model->clone(), pool, beta);
        const LabeledDataset test = sample_mixture(model, 20000, lane.derive(2).seed());
        double mc_error = 0.0;
        const double information =
            mean_set_size(predict_memberships(predictor, test.features), &mc_error);
        const double deviation = std::abs(information - beta);
        const double band = 3.0 * K / std::sqrt(pool_size) + 3.0 * mc_error;
        worst_margin = std::min(worst_margin, band - deviation);
        if (deviation > band) {
          return fail("beta " + fmt(beta) + ", N " + std::to_string(pool_size) + ": |info-beta| " +
                      fmt(deviation) + " exceeds band " + fmt(band));
        }
        deviation_total += deviation;
      }
      const double mean_deviation = deviation_total / replicates;
      if (!(mean_deviation < previous_mean)) {
        return fail("beta " + fmt(beta) + ": mean |info-beta| " + fmt(mean_deviation) + " at N " +
                    std::to_string(pool_size) + " did not improve on " + fmt(previous_mean));
      }
      previous_mean = mean_deviation;
    }
  }
  return pass("45 calibrations in band; worst band margin " + fmt(worst_margin));
}

// ---------------------------------------------------------------------------
// Check 3: the excess risk of a size-normalized threshold rule equals the
// mean |probability - threshold| mass over the symmetric difference with the
// exact rule, within 3e-3 at one million Monte Carlo points; the excess
// itself stays above -3 sampling errors.
// ---------------------------------------------------------------------------
Outcome check_identity() {
  const GaussianMixtureModel model = uniform_means_model(3, 3, 0.0, 3.0, RandomSeed{301});
  Rng rng(RandomSeed{302});
  const int mc_size = 1000000;
  const double mc_error = 3.0 / std::sqrt(static_cast<double>(mc_size));

  double worst_gap = 0.0, lowest_lhs = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd thresholds(3);
    for (int k = 0; k < 3; ++k) thresholds(k) = 0.1 + 0.5 * rng.uniform01();
    const IdentityCheckResult result =
        excess_risk_identity_check(model, 1.5, thresholds, mc_size, rng.derive(trial + 10).seed());
    worst_gap = std::max(worst_gap, std::abs(result.lhs - result.rhs));
    lowest_lhs = std::min(lowest_lhs, result.lhs);
  }
  std::ostringstream detail;
  detail << "20 rules: max |lhs-rhs| " << fmt(worst_gap) << " (limit 0.003), min lhs "
         << fmt(lowest_lhs) << " (floor " << fmt(-3.0 * mc_error) << ")";
  const bool ok = worst_gap <= 3e-3 && lowest_lhs >= -3.0 * mc_error;
  return ok ? pass(detail.str()) : fail(detail.str());
}

// ---------------------------------------------------------------------------
// Check 4: closed-form calibrated thresholds agree with the bisection
// root-finder to 1e-10 across the whole ratio range for all three losses.
// ---------------------------------------------------------------------------
Outcome check_threshold_closed_forms() {
  double worst = 0.0;
  for (const LossKind kind : {LossKind::boosting, LossKind::logistic, LossKind::squared}) {
    const Loss loss(kind);
    for (double g = 0.005; g < 0.9951; g += 0.005) {
      const double closed = calibrated_threshold(loss, g).delta_star;
      const double numeric = calibrated_threshold_numeric(loss, g).delta_star;
      worst = std::max(worst, std::abs(closed - numeric));
      if (std::abs(closed - numeric) > 1e-10) {
        return fail(loss.name() + " at g=" + fmt(g) + ": closed " + fmt(closed, 17) +
                    " vs numeric " + fmt(numeric, 17));
      }
    }
  }
  return pass("597 grid points x 3 losses, max gap " + fmt(worst, 3) + " (limit 1e-10)");
}

// ---------------------------------------------------------------------------
// Check 5: on randomized draws from a continuous score pool, the rescaled
// tail-sum values G(Z)/K are uniform on (0,1) — Kolmogorov-Smirnov at the
// 0.001 level over 1e5 draws, with a small allowance for the finite pool.
// ---------------------------------------------------------------------------
Outcome check_rank_uniformity() {
  Rng rng(RandomSeed{505});
  const int pool_rows = 2000, classes = 3, draws = 100000;
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(pool_rows, classes);
  for (int i = 0; i < pool_rows; ++i) {
    for (int k = 0; k < classes; ++k) pool.scores(i, k) = rng.normal();
  }
  const EmpiricalG g = build_empirical_g(pool);
  const std::vector<double> z = randomized_pool_draw(pool, draws, rng.derive(2).seed());

  std::vector<double> u(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) u[i] = g.g_value(z[i]) / classes;
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = static_cast<double>(i + 1) / u.size();
    const double lo = static_cast<double>(i) / u.size();
    ks = std::max(ks, std::max(std::abs(u[i] - hi), std::abs(u[i] - lo)));
  }
  const double critical =
      std::sqrt(-std::log(0.0005) / 2.0) / std::sqrt(static_cast<double>(draws)) +
      1.5 / pool_rows;
  std::ostringstream detail;
  detail << "KS statistic " << fmt(ks) << " vs critical " << fmt(critical) << " at level 0.001";
  return ks <= critical ? pass(detail.str()) : fail(detail.str());
}

// ---------------------------------------------------------------------------
// Check 6: mean excess risk over 10 seeded replicates strictly decreases as
// the training size grows 100 -> 1000 -> 10000 on the benchmark design, and
// the analytic risk gradient matches central differences to 1e-5 relative.
// ---------------------------------------------------------------------------
Outcome check_consistency_trend() {
  const GaussianMixtureModel small_design = uniform_means_model(3, 2, 0.0, 3.0, RandomSeed{601});
  const LabeledDataset sample = sample_mixture(small_design, 40, RandomSeed{602});
  Rng rng(RandomSeed{603});
  const double h = 1e-6;
  double worst_relative = 0.0;
  for (const LossKind kind : {LossKind::boosting, LossKind::logistic, LossKind::squared}) {
    const Loss loss(kind);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::MatrixXd weights(3, 2);
      Eigen::VectorXd biases(3);
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 2; ++j) weights(k, j) = 0.6 * (rng.uniform01() - 0.5);
        biases(k) = 0.6 * (rng.uniform01() - 0.5);
      }
      const AffineScoreModel model(weights, biases, 5.0);
      const ErmGradient gradient = phi_risk_gradient(model, sample, loss);
      const auto risk_at = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
        return empirical_phi_risk(AffineScoreModel(w, b, 5.0), sample, loss);
      };
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 2; ++j) {
          Eigen::MatrixXd up = weights, down = weights;
          up(k, j) += h;
          down(k, j) -= h;
          const double fd = (risk_at(up, biases) - risk_at(down, biases)) / (2 * h);
          worst_relative = std::max(
              worst_relative, std::abs(gradient.weights(k, j) - fd) / (1.0 + std::abs(fd)));
        }
        Eigen::VectorXd up = biases, down = biases;
        up(k) += h;
        down(k) -= h;
        const double fd = (risk_at(weights, up) - risk_at(weights, down)) / (2 * h);
        worst_relative =
            std::max(worst_relative, std::abs(gradient.biases(k) - fd) / (1.0 + std::abs(fd)));
      }
    }
  }
  if (worst_relative > 1e-5) {
    return fail("gradient check: worst relative error " + fmt(worst_relative) +
                " exceeds 1e-5");
  }

  const SweepReport sweep =
      consistency_sweep({100, 1000, 10000}, {1000}, RandomSeed{606}, 10, 2.0, 20000);
  const double a = sweep.rows[0].mean_excess_risk;
  const double b = sweep.rows[1].mean_excess_risk;
  const double c = sweep.rows[2].mean_excess_risk;
  std::ostringstream detail;
  detail << "mean excess risk " << fmt(a) << " -> " << fmt(b) << " -> " << fmt(c)
         << " over n=100/1000/10000; gradient worst relative error " << fmt(worst_relative);
  return (a > b && b > c) ? pass(detail.str()) : fail(detail.str());
}

// ---------------------------------------------------------------------------
// Check 7: the cross-validated aggregate is never worse than its best
// component — exactly on the surrogate objective, and within 0.02 on the
// downstream set risk at beta=2.
// ---------------------------------------------------------------------------
Outcome check_aggregation_dominance() {
  Rng root(RandomSeed{707});
  const GaussianMixtureModel model = benchmark_design(root.derive(1).seed());
  const LabeledDataset train = sample_mixture(model, 2000, root.derive(2).seed());
  UnlabeledDataset pool;
  pool.features = sample_mixture(model, 1000, root.derive(3).seed()).features;
  const LabeledDataset test = sample_mixture(model, 20000, root.derive(4).seed());
  const auto library = parse_algorithm_list("softmax,knn,gaussian");

  AggregationConfig config;
  AggregationResult result = fit_aggregated_model(train, library, config, root.derive(5).seed());
  const double vertex_floor = result.vertex_risks.minCoeff();
  if (result.aggregate_cv_risk > vertex_floor + 1e-8) {
    return fail("aggregate surrogate risk " + fmt(result.aggregate_cv_risk, 12) +
                " exceeds best component " + fmt(vertex_floor, 12) + " + 1e-8");
  }

  double best_single = std::numeric_limits<double>::infinity();
  for (const auto& algorithm : library) {
    const auto predictor = calibrate(algorithm.fit(train), pool, 2.0);
    best_single = std::min(best_single, evaluate(predictor, test).risk);
  }
  const auto predictor = calibrate(result.model->clone(), pool, 2.0);
  const double aggregate_risk = evaluate(predictor, test).risk;

  std::ostringstream detail;
  detail << "surrogate " << fmt(result.aggregate_cv_risk) << " <= best component "
         << fmt(vertex_floor) << "; set risk " << fmt(aggregate_risk) << " vs best single "
         << fmt(best_single) << " + 0.02";
  return aggregate_risk <= best_single + 0.02 ? pass(detail.str()) : fail(detail.str());
}

// ---------------------------------------------------------------------------
// Check 8: exact agreement with exhaustive brute force — the pooled tail-sum
// function and its inverse on every pool of at most 12 scores, and the
// nearest-neighbor probabilities on 100 random instances.
// ---------------------------------------------------------------------------
Outcome check_brute_force_agreement() {
  Rng rng(RandomSeed{808});

  for (int trial = 0; trial < 300; ++trial) {
    const int classes = 2 + static_cast<int>(rng.below(2));
    const int rows = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(12 / classes)));
    ScorePool pool;
    pool.scores = Eigen::MatrixXd(rows, classes);
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < classes; ++k) {
        pool.scores(i, k) = (static_cast<double>(rng.below(17)) - 8.0) / 4.0;
      }
    }
    const EmpiricalG g = build_empirical_g(pool);
    const auto brute_g = [&](double t) {
      int count = 0;
      for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < classes; ++k) count += pool.scores(i, k) >= t ? 1 : 0;
      }
      return static_cast<double>(count) / rows;
    };
    for (double t = -2.25; t <= 2.26; t += 0.125) {
      if (g.g_value(t) != brute_g(t)) {
        return fail("pool " + std::to_string(trial) + ": G(" + fmt(t) + ") = " +
                    fmt(g.g_value(t)) + " but brute count gives " + fmt(brute_g(t)));
      }
    }
    std::vector<double> values(g.sorted_pool());
    for (double beta = 0.1; beta < classes - 0.049; beta += 0.1) {
      double brute_inverse = values.back();
      for (const double s : values) {  // descending: first score still above beta
        if (brute_g(s) > beta) {
          brute_inverse = s;
          break;
        }
      }
      if (g.g_inverse(beta) != brute_inverse) {
        return fail("pool " + std::to_string(trial) + ": inverse at beta " + fmt(beta) + " = " +
                    fmt(g.g_inverse(beta), 17) + " but brute scan gives " +
                    fmt(brute_inverse, 17));
      }
    }
  }

  for (int instance = 0; instance < 100; ++instance) {
    const int n = 5 + static_cast<int>(rng.below(26));
    const int d = 1 + static_cast<int>(rng.below(3));
    const int classes = 2 + static_cast<int>(rng.below(2));
    LabeledDataset data;
    data.features = Eigen::MatrixXd(n, d);
    data.labels.resize(n);
    data.class_count = classes;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        data.features(i, j) = (static_cast<double>(rng.below(13)) - 6.0) / 2.0;
      }
      data.labels[i] = i < classes ? i + 1 : 1 + static_cast<int>(rng.below(classes));
    }
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto model = fit_knn(data, k);
    for (int q = 0; q < 5; ++q) {
      Eigen::MatrixXd query(1, d);
      for (int j = 0; j < d; ++j) {
        query(0, j) = (static_cast<double>(rng.below(13)) - 6.0) / 2.0;
      }
      std::vector<std::pair<double, int>> order(n);
      for (int i = 0; i < n; ++i) {
        order[i] = {(data.features.row(i) - query.row(0)).squaredNorm(), i};
      }
      std::stable_sort(order.begin(), order.end());
      Eigen::VectorXd votes = Eigen::VectorXd::Zero(classes);
      for (int i = 0; i < k; ++i) votes(data.labels[order[i].second] - 1) += 1.0;
      const Eigen::VectorXd brute_scores = (2.0 * (votes / k).array() - 1.0).matrix();
      const Eigen::MatrixXd scores = model->scores(query);
      for (int c = 0; c < classes; ++c) {
        if (scores(0, c) != brute_scores(c)) {
          return fail("knn instance " + std::to_string(instance) + ": class " +
                      std::to_string(c + 1) + " score " + fmt(scores(0, c), 17) +
                      " but brute sort gives " + fmt(brute_scores(c), 17));
        }
      }
    }
  }
  return pass("300 small pools and 100 neighbor instances agree exactly");
}

// ---------------------------------------------------------------------------
// Check 9 (optional): forest cover dataset. Point CONFSET_FOREST_CSV at a
// labeled CSV (column `label`, >= 523 rows); the aggregated pipeline on a
// 200/100/223 split must reach set risk <= 0.05 and mean size 2.0 +- 0.15.
// ---------------------------------------------------------------------------
Outcome check_forest_dataset() {
  const char* path = std::getenv("CONFSET_FOREST_CSV");
  if (path == nullptr || path[0] == '\0') {
    return skip("set CONFSET_FOREST_CSV to a labeled forest cover CSV to enable");
  }
  const LabeledDataset data = load_labeled_csv(path, "label");
  if (data.n() < 523) {
    return fail("need at least 523 rows for the 200/100/223 split, got " +
                std::to_string(data.n()));
  }
  Rng rng(RandomSeed{909});
  std::vector<int> order(data.n());
  for (int i = 0; i < data.n(); ++i) order[i] = i;
  rng.shuffle(order);
  const LabeledDataset train =
      select_rows(data, std::vector<int>(order.begin(), order.begin() + 200));
  const LabeledDataset held =
      select_rows(data, std::vector<int>(order.begin() + 200, order.begin() + 300));
  const LabeledDataset test =
      select_rows(data, std::vector<int>(order.begin() + 300, order.begin() + 523));
  UnlabeledDataset pool;
  pool.features = held.features;

  AggregationResult result = fit_aggregated_model(train, parse_algorithm_list("softmax,knn,gaussian"),
                                                  AggregationConfig{}, rng.derive(2).seed());
  const auto predictor = calibrate(std::move(result.model), pool, 2.0);
  const EvaluationReport report = evaluate(predictor, test);
  std::ostringstream detail;
  detail << "set risk " << fmt(report.risk) << " (limit 0.05), mean size "
         << fmt(report.information) << " (band 2.0+-0.15)";
  const bool ok = report.risk <= 0.05 && std::abs(report.information - 2.0) <= 0.15;
  return ok ? pass(detail.str()) : fail(detail.str());
}

struct Check {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = {
      {1, "synthetic benchmark risk bands", check_benchmark_bands},
      {2, "set size tracks the budget", check_information_control},
      {3, "excess-risk accounting identity", check_identity},
      {4, "closed-form thresholds match the root finder", check_threshold_closed_forms},
      {5, "pooled score ranks are uniform", check_rank_uniformity},
      {6, "risk decreases with training size", check_consistency_trend},
      {7, "aggregate matches its best component", check_aggregation_dominance},
      {8, "exhaustive small-case agreement", check_brute_force_agreement},
      {9, "forest cover dataset pipeline", check_forest_dataset},
  };
  return checks;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      const int id = std::stoi(arg);
      if (id < 1 || id > static_cast<int>(all_checks().size())) throw std::out_of_range(arg);
      selected.push_back(id);
    } catch (const std::exception&) {
      std::cerr << "usage: acceptance [check-number ...]   (numbers 1-"
                << all_checks().size() << ")\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& check : all_checks()) selected.push_back(check.id);
  }

  int failures = 0;
  for (const int id : selected) {
    const Check& check = all_checks()[id - 1];
    Outcome outcome;
    try {
      outcome = check.run();
    } catch (const std::exception& error) {
      outcome = fail(std::string("exception: ") + error.what());
    }
    const char* tag = outcome.status == Outcome::Status::pass   ? "[PASS]"
                      : outcome.status == Outcome::Status::skip ? "[SKIP]"
                                                                : "[FAIL]";
    std::cout << tag << " check " << check.id << " (" << check.name << "): " << outcome.detail
              << std::endl;
    if (outcome.status == Outcome::Status::fail) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
