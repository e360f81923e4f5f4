#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "confset/dataset.hpp"
#include "confset/learners.hpp"
#include "confset/loss.hpp"
#include "confset/score_model.hpp"

namespace confset {

// Cached fold-out scores: scores[v][m] holds algorithm m (trained on the
// complement of fold v+1) evaluated on fold v+1's rows.
struct CvRiskTable {
  std::vector<std::vector<Eigen::MatrixXd>> scores;
  std::vector<std::vector<int>> fold_labels;
  int class_count = 0;

  int fold_count() const { return static_cast<int>(scores.size()); }
  int algorithm_count() const { return scores.empty() ? 0 : static_cast<int>(scores[0].size()); }
};

struct SimplexWeights {
  Eigen::VectorXd weights;

  void validate() const;  // entries >= 0, sum 1 within 1e-10
};

enum class WeightMode { continuous, grid };

// Convex combination of base models fitted on the full training set.
class AggregatedScoreModel : public ScoreModel {
 public:
  AggregatedScoreModel(std::vector<std::unique_ptr<ScoreModel>> base_models,
                       SimplexWeights weights);
  AggregatedScoreModel(const AggregatedScoreModel& other);

  int class_count() const override { return base_models_[0]->class_count(); }
  int dimension() const override { return base_models_[0]->dimension(); }
  std::string kind() const override { return "aggregated"; }
  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const override;
  std::unique_ptr<ScoreModel> clone() const override;

  const std::vector<std::unique_ptr<ScoreModel>>& base_models() const { return base_models_; }
  const SimplexWeights& weights() const { return weights_; }

 private:
  std::vector<std::unique_ptr<ScoreModel>> base_models_;
  SimplexWeights weights_;
};

CvRiskTable build_cv_table(const LabeledDataset& data,
                           const std::vector<ScoreAlgorithm>& algorithms,
                           const FoldPartition& partition);

// Cross-validated surrogate risk of the weighted score: mean over folds of
// the fold's empirical risk of sum_m weights_m * scores[v][m].
double cv_phi_risk(const CvRiskTable& table, const SimplexWeights& weights, const Loss& loss);

// Minimizes cv_phi_risk over the simplex. Continuous mode: exponentiated
// gradient descent (5000 iterations max, relative decrease 1e-10) with a
// final comparison against all vertices; grid mode: exhaustive search over
// lattice weights with grid_resolution steps per coordinate total.
SimplexWeights fit_superlearner_weights(const CvRiskTable& table, const Loss& loss,
                                        WeightMode mode, int grid_resolution = 100);

struct AggregationConfig {
  int folds = 5;
  Loss loss{LossKind::boosting};
  WeightMode mode = WeightMode::continuous;
  int grid_resolution = 100;
  // Default: refit base models on the full data and weight those. The
  // alternative keeps the V fold-trained models per algorithm, uniformly
  // averaged, as that algorithm's component.
  bool aggregate_fold_models = false;
};

struct AggregationResult {
  std::unique_ptr<AggregatedScoreModel> model;
  SimplexWeights weights;
  Eigen::VectorXd vertex_risks;  // CV risk of each algorithm alone
  double aggregate_cv_risk = 0.0;
};

AggregationResult fit_aggregated_model(const LabeledDataset& data,
                                       const std::vector<ScoreAlgorithm>& algorithms,
                                       const AggregationConfig& config, RandomSeed seed);

}  // namespace confset
