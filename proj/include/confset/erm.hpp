#pragma once

#include <Eigen/Dense>

#include "confset/dataset.hpp"
#include "confset/loss.hpp"
#include "confset/rng.hpp"
#include "confset/score_model.hpp"

namespace confset {

// Affine per-class scores, clamped into [-clamp_bound, clamp_bound] at
// evaluation; parameters live in the same infinity-norm ball.
class AffineScoreModel : public ScoreModel {
 public:
  AffineScoreModel(Eigen::MatrixXd weights, Eigen::VectorXd biases, double clamp_bound);

  int class_count() const override { return static_cast<int>(weights_.rows()); }
  int dimension() const override { return static_cast<int>(weights_.cols()); }
  std::string kind() const override { return "erm_affine"; }
  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const override;
  std::unique_ptr<ScoreModel> clone() const override;

  // Scores before clamping.
  Eigen::MatrixXd raw_scores(const Eigen::MatrixXd& X) const;

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  double clamp_bound() const { return clamp_bound_; }

 private:
  Eigen::MatrixXd weights_;  // K rows x d columns
  Eigen::VectorXd biases_;   // K
  double clamp_bound_;
};

struct ErmConfig {
  int max_iterations = 10000;
  double relative_tolerance = 1e-8;
  double initial_step = 1.0;
  Loss loss{LossKind::logistic};
  double clamp_bound = 5.0;
};

struct ErmGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

// Mean over rows of the summed per-class surrogate loss at signed margins
// z_ik * score_ik, with z_ik = +1 for the row's label and -1 otherwise.
double empirical_phi_risk(const ScoreModel& model, const LabeledDataset& data, const Loss& loss);

// Analytic gradient of the empirical risk in the affine parameters; the
// clamp contributes identity inside (-B, B) and zero outside.
ErmGradient phi_risk_gradient(const AffineScoreModel& model, const LabeledDataset& data,
                              const Loss& loss);

// One descent step followed by projection of all parameters onto the
// infinity-norm ball of radius clamp_bound.
AffineScoreModel erm_step(const AffineScoreModel& model, const ErmGradient& gradient, double step);

// Full-batch projected gradient descent from zero initialization with an
// Armijo backtracking line search. Deterministic; the seed parameter is part
// of the fitting contract but unused. risk_trajectory, when given, receives
// the accepted risk value of every iteration including the initial one.
AffineScoreModel fit_erm(const LabeledDataset& data, const ErmConfig& config, RandomSeed seed,
                         std::vector<double>* risk_trajectory = nullptr);

}  // namespace confset
