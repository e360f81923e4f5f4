#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "confset/calibration.hpp"
#include "confset/dataset.hpp"
#include "confset/rng.hpp"

namespace confset {

// Synthetic generator with analytically known conditional probabilities:
// Y uniform on {1,...,K}, X | Y=k ~ Normal(mean row k, identity).
struct GaussianMixtureModel {
  Eigen::MatrixXd means;  // K rows x d columns

  int class_count() const { return static_cast<int>(means.rows()); }
  int dimension() const { return static_cast<int>(means.cols()); }
};

// Means with i.i.d. uniform coordinates on [low, high].
GaussianMixtureModel uniform_means_model(int class_count, int dimension, double low, double high,
                                         RandomSeed seed);

// The benchmark design used throughout: K=10, d=10, means uniform on [0,4]^10.
GaussianMixtureModel benchmark_design(RandomSeed seed);

// Sorted ascending member labels, each in {1,...,K}.
struct LabelSet {
  std::vector<int> members;

  bool contains(int label) const;
  int size() const { return static_cast<int>(members.size()); }
};

LabeledDataset sample_mixture(const GaussianMixtureModel& model, int count, RandomSeed seed);

// Conditional class probabilities at one point, computed with a max-shifted
// softmax over the exact Gaussian log-densities.
Eigen::VectorXd posterior(const GaussianMixtureModel& model, const Eigen::VectorXd& x);

// Row i = posterior at X.row(i).
Eigen::MatrixXd posterior_matrix(const GaussianMixtureModel& model, const Eigen::MatrixXd& X);

// Monte Carlo stand-in for the analytic tail-sum function G of the true
// conditional probabilities: pool_size posterior vectors feed an EmpiricalG.
EmpiricalG build_true_g(const GaussianMixtureModel& model, int pool_size, RandomSeed seed);

// {k : G(p_k(x)) <= beta} with G the Monte Carlo EmpiricalG above.
LabelSet oracle_beta_set(const GaussianMixtureModel& model, const EmpiricalG& g_true, double beta,
                         const Eigen::VectorXd& x);

// The `size` labels with largest probability; ties keep the smallest label.
LabelSet max_set(const Eigen::VectorXd& probabilities, int size);

using SetRule = std::function<LabelSet(const Eigen::VectorXd&)>;

struct RiskInformation {
  double risk = 0.0;         // fraction of test rows whose label the set misses
  double information = 0.0;  // mean set size
};

RiskInformation estimate_risk_and_information(const SetRule& rule, const LabeledDataset& test);

// risk + t * information.
double lt_risk(const SetRule& rule, const LabeledDataset& test, double t);

struct IdentityCheckResult {
  double lhs = 0.0;  // risk(candidate) - risk(oracle set)
  double rhs = 0.0;  // mean over the symmetric difference of |p_k - threshold|
  double threshold = 0.0;
  double applied_shift = 0.0;
};

// Compares the excess risk of a per-class-threshold rule against its
// symmetric-difference form, both estimated on one shared Monte Carlo draw
// with risks computed from the conditional probabilities. The candidate's
// thresholds are first shifted by a common scalar (bisection) until its
// Monte Carlo information matches beta within 1e-3.
IdentityCheckResult excess_risk_identity_check(const GaussianMixtureModel& model, double beta,
                                               const Eigen::VectorXd& per_class_thresholds,
                                               int mc_size, RandomSeed seed);

}  // namespace confset
