#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "confset/calibration.hpp"
#include "confset/dataset.hpp"
#include "confset/gaussian_mixture.hpp"
#include "confset/score_model.hpp"
#include "confset/superlearner.hpp"

namespace confset {

// A score model plus the empirical tail-sum function of its scores on an
// unlabeled pool; predicts the set {k : G(score_k(x)) <= beta}.
struct ConfidenceSetPredictor {
  std::unique_ptr<ScoreModel> score_model;
  EmpiricalG calibrator;
  double beta = 0.0;
  bool jitter = false;
  std::uint64_t jitter_salt = 0;

  ConfidenceSetPredictor() = default;
  ConfidenceSetPredictor(const ConfidenceSetPredictor& other);
  ConfidenceSetPredictor(ConfidenceSetPredictor&&) = default;
  ConfidenceSetPredictor& operator=(ConfidenceSetPredictor&&) = default;
};

ConfidenceSetPredictor calibrate(std::unique_ptr<ScoreModel> score_model,
                                 const UnlabeledDataset& unlabeled, double beta,
                                 bool jitter = false, std::uint64_t jitter_salt = 0);

LabelSet predict_set(const ConfidenceSetPredictor& predictor, const Eigen::VectorXd& x);

// One row per query; entry (i, k) says whether label k+1 is in the set.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> predict_memberships(
    const ConfidenceSetPredictor& predictor, const Eigen::MatrixXd& X);

struct BetaRow {
  double beta = 0.0;
  double risk = 0.0;
  double information = 0.0;
  double empty_set_fraction = 0.0;
};

struct EvaluationReport {
  double risk = 0.0;
  double information = 0.0;
  double beta_target = 0.0;
  int n_test = 0;
  double empty_set_fraction = 0.0;
  std::vector<BetaRow> per_beta_rows;  // filled when a sweep list is given

  std::string to_csv() const;
  std::string to_text() const;
};

EvaluationReport evaluate(const ConfidenceSetPredictor& predictor, const LabeledDataset& test,
                          const std::vector<double>& beta_sweep = {});

struct BenchmarkRow {
  std::string method;
  double risk = 0.0;
  double information = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  double oracle_threshold = 0.0;
  double mc_standard_error = 0.0;

  std::string to_csv() const;
  std::string to_text() const;
};

struct BenchmarkConfig {
  int pool_size = 1000000;   // Monte Carlo pool behind the true G
  int test_size = 100000;
  int train_size = 2000;
  int calibration_size = 1000;
  double beta = 2.0;
  bool include_superlearner = true;
};

// The synthetic benchmark: K=10, d=10, means uniform on [0,4]^10, beta=2.
// Compares the exact-probability set rule, the top-2 baseline, the fitted
// affine score pipeline and the aggregated pipeline on one test draw.
BenchmarkReport run_remark1_benchmark(RandomSeed seed, const BenchmarkConfig& config = {});

struct SweepRow {
  int n = 0;
  int pool_size = 0;
  double mean_excess_risk = 0.0;
  double mean_information_deviation = 0.0;  // mean |information - beta|
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double beta = 0.0;
  int replicates = 0;

  std::string to_csv() const;
  std::string to_text() const;
};

// Excess risk of the fitted pipeline over the exact-probability rule on a
// fixed synthetic design, averaged over seeded replicates, for each
// (train size, calibration pool size) pair.
SweepReport consistency_sweep(const std::vector<int>& n_list, const std::vector<int>& pool_list,
                              RandomSeed seed, int replicates = 10, double beta = 2.0,
                              int test_size = 20000);

}  // namespace confset
