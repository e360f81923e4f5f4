#include "confset/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confset/error.hpp"

namespace confset {

GaussianMixtureModel uniform_means_model(int class_count, int dimension, double low, double high,
                                         RandomSeed seed) {
  if (class_count < 2) throw ValidationError("class count must be >= 2");
  if (dimension < 1) throw ValidationError("dimension must be >= 1");
  if (!(low < high)) throw ValidationError("means range must satisfy low < high");
  Rng rng(seed);
  GaussianMixtureModel model;
  model.means.resize(class_count, dimension);
  for (int k = 0; k < class_count; ++k) {
    for (int j = 0; j < dimension; ++j) {
      model.means(k, j) = low + (high - low) * rng.uniform01();
    }
  }
  return model;
}

GaussianMixtureModel benchmark_design(RandomSeed seed) {
  return uniform_means_model(10, 10, 0.0, 4.0, seed);
}

bool LabelSet::contains(int label) const {
  return std::binary_search(members.begin(), members.end(), label);
}

LabeledDataset sample_mixture(const GaussianMixtureModel& model, int count, RandomSeed seed) {
  if (count < 1) throw ValidationError("sample count must be >= 1");
  Rng rng(seed);
  const int K = model.class_count();
  const int d = model.dimension();
  LabeledDataset data;
  data.class_count = K;
  data.features.resize(count, d);
  data.labels.resize(count);
  for (int i = 0; i < count; ++i) {
    const int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(K))) + 1;
    data.labels[i] = label;
    for (int j = 0; j < d; ++j) {
      data.features(i, j) = model.means(label - 1, j) + rng.normal();
    }
  }
  return data;
}

Eigen::MatrixXd posterior_matrix(const GaussianMixtureModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.dimension()) throw ValidationError("feature dimension mismatch");
  // Up to a per-row constant, log p(x | k) = x . mu_k - |mu_k|^2 / 2.
  const Eigen::VectorXd half_norms = 0.5 * model.means.rowwise().squaredNorm();
  Eigen::MatrixXd logits = X * model.means.transpose();
  logits.rowwise() -= half_norms.transpose();
  const Eigen::VectorXd shift = logits.rowwise().maxCoeff();
  logits.colwise() -= shift;
  Eigen::MatrixXd probs = logits.array().exp();
  const Eigen::VectorXd totals = probs.rowwise().sum();
  probs.array().colwise() /= totals.array();
  return probs;
}

Eigen::VectorXd posterior(const GaussianMixtureModel& model, const Eigen::VectorXd& x) {
  return posterior_matrix(model, x.transpose()).row(0);
}

EmpiricalG build_true_g(const GaussianMixtureModel& model, int pool_size, RandomSeed seed) {
  const LabeledDataset pool_sample = sample_mixture(model, pool_size, seed);
  ScorePool pool{posterior_matrix(model, pool_sample.features)};
  return build_empirical_g(pool);
}

LabelSet oracle_beta_set(const GaussianMixtureModel& model, const EmpiricalG& g_true, double beta,
                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd probs = posterior(model, x);
  LabelSet set;
  for (int k = 0; k < model.class_count(); ++k) {
    if (g_true.g_value(probs(k)) <= beta) set.members.push_back(k + 1);
  }
  return set;
}

LabelSet max_set(const Eigen::VectorXd& probabilities, int size) {
  const int K = static_cast<int>(probabilities.size());
  if (size < 1 || size > K) {
    throw ValidationError("set size must lie in [1, " + std::to_string(K) + "]");
  }
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return probabilities(a) > probabilities(b);  // stable keeps smaller index on ties
  });
  LabelSet set;
  set.members.reserve(size);
  for (int i = 0; i < size; ++i) set.members.push_back(order[i] + 1);
  std::sort(set.members.begin(), set.members.end());
  return set;
}

RiskInformation estimate_risk_and_information(const SetRule& rule, const LabeledDataset& test) {
  test.validate();
  std::int64_t misses = 0;
  std::int64_t total_size = 0;
  for (int i = 0; i < test.n(); ++i) {
    const LabelSet set = rule(test.features.row(i));
    if (!set.contains(test.labels[i])) ++misses;
    total_size += set.size();
  }
  RiskInformation result;
  result.risk = static_cast<double>(misses) / test.n();
  result.information = static_cast<double>(total_size) / test.n();
  return result;
}

double lt_risk(const SetRule& rule, const LabeledDataset& test, double t) {
  if (t < 0) throw ValidationError("size weight t must be >= 0");
  const RiskInformation estimate = estimate_risk_and_information(rule, test);
  return estimate.risk + t * estimate.information;
}

namespace {

// Mean set size of {k : p_k >= thresholds_k + shift} over posterior rows.
double shifted_information(const Eigen::MatrixXd& probs, const Eigen::VectorXd& thresholds,
                           double shift) {
  std::int64_t total = 0;
  for (int i = 0; i < probs.rows(); ++i) {
    for (int k = 0; k < probs.cols(); ++k) {
      if (probs(i, k) >= thresholds(k) + shift) ++total;
    }
  }
  return static_cast<double>(total) / probs.rows();
}

}  // namespace

IdentityCheckResult excess_risk_identity_check(const GaussianMixtureModel& model, double beta,
                                               const Eigen::VectorXd& per_class_thresholds,
                                               int mc_size, RandomSeed seed) {
  const int K = model.class_count();
  if (per_class_thresholds.size() != K) throw ValidationError("threshold count must equal K");
  if (mc_size < 1) throw ValidationError("mc_size must be >= 1");
  if (!(beta > 0.0 && beta < K)) throw ValidationError("beta must lie in (0, K)");

  Rng rng(seed);
  const EmpiricalG g_true = build_true_g(model, mc_size, rng.derive(1).seed());
  const double threshold = g_true.g_inverse(beta);

  const LabeledDataset eval = sample_mixture(model, mc_size, rng.derive(2).seed());
  const Eigen::MatrixXd probs = posterior_matrix(model, eval.features);

  // Shift the candidate thresholds until its information hits beta: the set
  // size is non-increasing in the shift, so bisection applies.
  double lo = -1.0, hi = 1.0;
  double shift = 0.0;
  bool converged = false;
  for (int iteration = 0; iteration < 200; ++iteration) {
    shift = 0.5 * (lo + hi);
    const double information = shifted_information(probs, per_class_thresholds, shift);
    if (std::abs(information - beta) <= 1e-3) {
      converged = true;
      break;
    }
    if (information > beta) {
      lo = shift;
    } else {
      hi = shift;
    }
  }
  if (!converged) {
    throw std::runtime_error("information normalization failed to reach beta within 1e-3");
  }

  IdentityCheckResult result;
  result.threshold = threshold;
  result.applied_shift = shift;
  double lhs_total = 0.0;
  double rhs_total = 0.0;
  for (int i = 0; i < probs.rows(); ++i) {
    for (int k = 0; k < K; ++k) {
      const double p = probs(i, k);
      const bool in_oracle = p >= threshold;
      const bool in_candidate = p >= per_class_thresholds(k) + shift;
      if (in_oracle != in_candidate) {
        // Conditional-risk contribution of the symmetric difference: the
        // candidate pays +p where it misses the oracle member, -p where it
        // includes an extra label; the right side accrues |p - threshold|.
        lhs_total += in_oracle ? p : -p;
        rhs_total += std::abs(p - threshold);
      }
    }
  }
  result.lhs = lhs_total / probs.rows();
  result.rhs = rhs_total / probs.rows();
  return result;
}

}  // namespace confset
