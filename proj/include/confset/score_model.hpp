#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

namespace confset {

// A fitted score function: maps feature rows to one real score per class.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  virtual int class_count() const = 0;
  virtual int dimension() const = 0;
  virtual std::string kind() const = 0;

  // Row i of the result = scores of all classes at X.row(i).
  virtual Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const = 0;

  virtual std::unique_ptr<ScoreModel> clone() const = 0;

  Eigen::VectorXd scores_at(const Eigen::VectorXd& x) const {
    return scores(x.transpose()).row(0);
  }
};

// Score model backed by a probability estimate; emitted scores are the
// centered transform 2*p - 1, so every learner scores into [-1, 1].
class ProbabilityScoreModel : public ScoreModel {
 public:
  virtual Eigen::MatrixXd probabilities(const Eigen::MatrixXd& X) const = 0;

  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const override {
    return 2.0 * probabilities(X).array() - 1.0;
  }
};

}  // namespace confset
