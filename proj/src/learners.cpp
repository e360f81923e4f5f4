#include "confset/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "confset/error.hpp"

namespace confset {
namespace {

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
  const Eigen::VectorXd shift = logits.rowwise().maxCoeff();
  logits.colwise() -= shift;
  Eigen::MatrixXd probs = logits.array().exp();
  probs.array().colwise() /= probs.rowwise().sum().array();
  return probs;
}

Eigen::MatrixXd one_hot(const LabeledDataset& data) {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(data.n(), data.class_count);
  for (int i = 0; i < data.n(); ++i) Y(i, data.labels[i] - 1) = 1.0;
  return Y;
}

}  // namespace

SoftmaxModel::SoftmaxModel(Eigen::MatrixXd weights, Eigen::VectorXd biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.rows() != biases_.size()) throw ValidationError("weights/biases shape mismatch");
}

Eigen::MatrixXd SoftmaxModel::probabilities(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd logits = X * weights_.transpose();
  logits.rowwise() += biases_.transpose();
  return softmax_rows(std::move(logits));
}

std::unique_ptr<ScoreModel> SoftmaxModel::clone() const {
  return std::make_unique<SoftmaxModel>(*this);
}

std::unique_ptr<ScoreModel> fit_softmax(const LabeledDataset& data) {
  data.validate();
  const int K = data.class_count;
  const int d = data.d();
  const int n = data.n();
  if (n < K) throw ValidationError("softmax needs n >= class count");
  const Eigen::MatrixXd Y = one_hot(data);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(K, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
  const auto negative_log_likelihood = [&](const Eigen::MatrixXd& weights,
                                           const Eigen::VectorXd& biases) {
    Eigen::MatrixXd logits = data.features * weights.transpose();
    logits.rowwise() += biases.transpose();
    const Eigen::VectorXd shift = logits.rowwise().maxCoeff();
    logits.colwise() -= shift;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += std::log(logits.row(i).array().exp().sum()) - logits(i, data.labels[i] - 1);
    }
    return total / n;
  };

  double value = negative_log_likelihood(W, b);
  double last_step = 1.0;
  for (int iteration = 0; iteration < 10000; ++iteration) {
    Eigen::MatrixXd logits = data.features * W.transpose();
    logits.rowwise() += b.transpose();
    const Eigen::MatrixXd residual = (softmax_rows(std::move(logits)) - Y) / n;
    const Eigen::MatrixXd gW = residual.transpose() * data.features;
    const Eigen::VectorXd gb = residual.colwise().sum();
    const double gradient_norm2 = gW.squaredNorm() + gb.squaredNorm();
    if (gradient_norm2 == 0.0) break;

    double trial = 2.0 * last_step;
    bool accepted = false;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    double value2 = value;
    while (trial >= 1e-20) {
      W2 = W - trial * gW;
      b2 = b - trial * gb;
      value2 = negative_log_likelihood(W2, b2);
      if (!std::isfinite(value2)) throw std::runtime_error("non-finite softmax likelihood");
      if (value2 <= value - 1e-4 * trial * gradient_norm2) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    last_step = trial;
    const double relative_decrease = (value - value2) / std::max(std::abs(value), 1e-300);
    W = std::move(W2);
    b = std::move(b2);
    value = value2;
    if (relative_decrease < 1e-8) break;
  }
  return std::make_unique<SoftmaxModel>(std::move(W), std::move(b));
}

KnnModel::KnnModel(Eigen::MatrixXd train_features, std::vector<int> train_labels, int class_count,
                   int k)
    : train_features_(std::move(train_features)),
      train_labels_(std::move(train_labels)),
      class_count_(class_count),
      k_(k) {
  const int n = static_cast<int>(train_features_.rows());
  if (k_ < 1 || k_ > n) {
    throw ValidationError("neighbor count must lie in [1, " + std::to_string(n) + "], got " +
                          std::to_string(k_));
  }
}

Eigen::MatrixXd KnnModel::probabilities(const Eigen::MatrixXd& X) const {
  if (X.cols() != train_features_.cols()) throw ValidationError("feature dimension mismatch");
  const int n_train = static_cast<int>(train_features_.rows());
  const int n_query = static_cast<int>(X.rows());
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(n_query, class_count_);
  const Eigen::VectorXd train_norms = train_features_.rowwise().squaredNorm();

  // Block the query side so the distance buffer stays modest.
  const int block = 1024;
  std::vector<std::pair<double, int>> order(n_train);
  for (int start = 0; start < n_query; start += block) {
    const int rows = std::min(block, n_query - start);
    const Eigen::MatrixXd chunk = X.middleRows(start, rows);
    // Squared distances via the norm expansion; the query norm is a per-row
    // constant and cannot change the neighbor ranking, so it is dropped.
    Eigen::MatrixXd cross = chunk * train_features_.transpose();
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < n_train; ++j) {
        order[j] = {train_norms(j) - 2.0 * cross(i, j), j};
      }
      std::partial_sort(order.begin(), order.begin() + k_, order.end());
      for (int m = 0; m < k_; ++m) {
        probs(start + i, train_labels_[order[m].second] - 1) += 1.0;
      }
    }
  }
  return probs / static_cast<double>(k_);
}

std::unique_ptr<ScoreModel> KnnModel::clone() const { return std::make_unique<KnnModel>(*this); }

std::unique_ptr<ScoreModel> fit_knn(const LabeledDataset& data, int k) {
  data.validate();
  return std::make_unique<KnnModel>(data.features, data.labels, data.class_count, k);
}

GaussianGenerativeModel::GaussianGenerativeModel(Eigen::MatrixXd means, Eigen::VectorXd variances,
                                                 Eigen::VectorXd log_priors)
    : means_(std::move(means)),
      variances_(std::move(variances)),
      log_priors_(std::move(log_priors)) {
  if (means_.rows() != log_priors_.size() || means_.cols() != variances_.size()) {
    throw ValidationError("generative model shape mismatch");
  }
  if ((variances_.array() <= 0).any()) throw ValidationError("variances must be positive");
}

Eigen::MatrixXd GaussianGenerativeModel::probabilities(const Eigen::MatrixXd& X) const {
  if (X.cols() != means_.cols()) throw ValidationError("feature dimension mismatch");
  const int K = class_count();
  Eigen::MatrixXd logits(X.rows(), K);
  const Eigen::ArrayXd inverse = variances_.array().inverse();
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXd centered = X.rowwise() - means_.row(k);
    logits.col(k) =
        -0.5 * (centered.array().square().rowwise() * inverse.transpose()).rowwise().sum() +
        log_priors_(k);
  }
  return softmax_rows(std::move(logits));
}

std::unique_ptr<ScoreModel> GaussianGenerativeModel::clone() const {
  return std::make_unique<GaussianGenerativeModel>(*this);
}

std::unique_ptr<ScoreModel> fit_gaussian_generative(const LabeledDataset& data) {
  data.validate();
  const int K = data.class_count;
  const int d = data.d();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(K, d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
  for (int i = 0; i < data.n(); ++i) {
    means.row(data.labels[i] - 1) += data.features.row(i);
    counts(data.labels[i] - 1) += 1.0;
  }
  for (int k = 0; k < K; ++k) {
    if (counts(k) < 2.0) {
      throw ValidationError("class " + std::to_string(k + 1) + " has " +
                            std::to_string(static_cast<int>(counts(k))) +
                            " rows; the generative learner needs at least 2");
    }
    means.row(k) /= counts(k);
  }
  Eigen::VectorXd variances = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::ArrayXd centered =
        (data.features.row(i) - means.row(data.labels[i] - 1)).array();
    variances.array() += centered.square();
  }
  variances = (variances / data.n()).array().max(1e-6);
  const Eigen::VectorXd log_priors = (counts / data.n()).array().log();
  return std::make_unique<GaussianGenerativeModel>(std::move(means), std::move(variances),
                                                   log_priors);
}

ScoreAlgorithm ScoreAlgorithm::from_name(const std::string& name) {
  ScoreAlgorithm algorithm;
  if (name == "softmax") {
    algorithm.kind = Kind::softmax;
  } else if (name == "knn") {
    algorithm.kind = Kind::knn;
  } else if (name == "gaussian") {
    algorithm.kind = Kind::gaussian_generative;
  } else if (name == "erm") {
    algorithm.kind = Kind::erm_affine;
  } else {
    throw ValidationError("unknown learner '" + name +
                          "' (expected softmax, knn, gaussian or erm)");
  }
  return algorithm;
}

std::string ScoreAlgorithm::name() const {
  switch (kind) {
    case Kind::softmax: return "softmax";
    case Kind::knn: return "knn";
    case Kind::gaussian_generative: return "gaussian";
    case Kind::erm_affine: return "erm";
  }
  return "";
}

std::unique_ptr<ScoreModel> ScoreAlgorithm::fit(const LabeledDataset& data) const {
  switch (kind) {
    case Kind::softmax: return fit_softmax(data);
    case Kind::knn: return fit_knn(data, k);
    case Kind::gaussian_generative: return fit_gaussian_generative(data);
    case Kind::erm_affine: return std::make_unique<AffineScoreModel>(fit_erm(data, erm, RandomSeed{0}));
  }
  throw ValidationError("unknown learner kind");
}

std::vector<ScoreAlgorithm> parse_algorithm_list(const std::string& comma_separated) {
  std::vector<ScoreAlgorithm> algorithms;
  std::stringstream stream(comma_separated);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) algorithms.push_back(ScoreAlgorithm::from_name(token));
  }
  if (algorithms.empty()) throw ValidationError("empty learner list");
  return algorithms;
}

}  // namespace confset
