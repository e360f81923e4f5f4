#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "confset/dataset.hpp"
#include "confset/erm.hpp"
#include "confset/score_model.hpp"

namespace confset {

// Multinomial logistic model; probabilities are a softmax over affine logits.
class SoftmaxModel : public ProbabilityScoreModel {
 public:
  SoftmaxModel(Eigen::MatrixXd weights, Eigen::VectorXd biases);

  int class_count() const override { return static_cast<int>(weights_.rows()); }
  int dimension() const override { return static_cast<int>(weights_.cols()); }
  std::string kind() const override { return "softmax"; }
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& X) const override;
  std::unique_ptr<ScoreModel> clone() const override;

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd biases_;
};

// Nearest-neighbor vote: probability of class c = fraction of the k nearest
// training rows (Euclidean) labeled c; distance ties keep earlier rows.
class KnnModel : public ProbabilityScoreModel {
 public:
  KnnModel(Eigen::MatrixXd train_features, std::vector<int> train_labels, int class_count, int k);

  int class_count() const override { return class_count_; }
  int dimension() const override { return static_cast<int>(train_features_.cols()); }
  std::string kind() const override { return "knn"; }
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& X) const override;
  std::unique_ptr<ScoreModel> clone() const override;

  int neighbor_count() const { return k_; }
  const Eigen::MatrixXd& train_features() const { return train_features_; }
  const std::vector<int>& train_labels() const { return train_labels_; }

 private:
  Eigen::MatrixXd train_features_;
  std::vector<int> train_labels_;
  int class_count_;
  int k_;
};

// Class-conditional Gaussians with per-class means, one shared diagonal
// covariance and empirical class priors.
class GaussianGenerativeModel : public ProbabilityScoreModel {
 public:
  GaussianGenerativeModel(Eigen::MatrixXd means, Eigen::VectorXd variances,
                          Eigen::VectorXd log_priors);

  int class_count() const override { return static_cast<int>(means_.rows()); }
  int dimension() const override { return static_cast<int>(means_.cols()); }
  std::string kind() const override { return "gaussian_generative"; }
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& X) const override;
  std::unique_ptr<ScoreModel> clone() const override;

  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::VectorXd& variances() const { return variances_; }
  const Eigen::VectorXd& log_priors() const { return log_priors_; }

 private:
  Eigen::MatrixXd means_;
  Eigen::VectorXd variances_;  // shared across classes, floored at 1e-6
  Eigen::VectorXd log_priors_;
};

std::unique_ptr<ScoreModel> fit_softmax(const LabeledDataset& data);
std::unique_ptr<ScoreModel> fit_knn(const LabeledDataset& data, int k);
std::unique_ptr<ScoreModel> fit_gaussian_generative(const LabeledDataset& data);

// A fittable algorithm choice for the aggregation library.
struct ScoreAlgorithm {
  enum class Kind { softmax, knn, gaussian_generative, erm_affine };

  Kind kind = Kind::softmax;
  int k = 11;          // knn only
  ErmConfig erm;       // erm_affine only

  static ScoreAlgorithm from_name(const std::string& name);
  std::string name() const;
  std::unique_ptr<ScoreModel> fit(const LabeledDataset& data) const;
};

std::vector<ScoreAlgorithm> parse_algorithm_list(const std::string& comma_separated);

}  // namespace confset
