#include "confset/erm.hpp"

#include <cmath>
#include <string>

#include "confset/error.hpp"

namespace confset {
namespace {

// Signed-label matrix: +1 where the row's label equals the column, else -1.
Eigen::MatrixXd signed_labels(const LabeledDataset& data) {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Constant(data.n(), data.class_count, -1.0);
  for (int i = 0; i < data.n(); ++i) Z(i, data.labels[i] - 1) = 1.0;
  return Z;
}

void check_dimensions(const ScoreModel& model, const LabeledDataset& data) {
  data.validate();
  if (model.dimension() != data.d()) {
    throw ValidationError("model expects " + std::to_string(model.dimension()) +
                          " features, data has " + std::to_string(data.d()));
  }
  if (model.class_count() != data.class_count) {
    throw ValidationError("model has " + std::to_string(model.class_count()) +
                          " classes, data has " + std::to_string(data.class_count));
  }
}

double risk_of_scores(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& Z, const Loss& loss) {
  double total = 0.0;
  for (int i = 0; i < scores.rows(); ++i) {
    for (int k = 0; k < scores.cols(); ++k) {
      total += loss.value(Z(i, k) * scores(i, k));
    }
  }
  return total / scores.rows();
}

}  // namespace

AffineScoreModel::AffineScoreModel(Eigen::MatrixXd weights, Eigen::VectorXd biases,
                                   double clamp_bound)
    : weights_(std::move(weights)), biases_(std::move(biases)), clamp_bound_(clamp_bound) {
  if (clamp_bound_ <= 0) throw ValidationError("clamp bound must be positive");
  if (weights_.rows() != biases_.size()) throw ValidationError("weights/biases shape mismatch");
  if (!weights_.allFinite() || !biases_.allFinite()) {
    throw ValidationError("non-finite affine parameters");
  }
}

Eigen::MatrixXd AffineScoreModel::raw_scores(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd raw = X * weights_.transpose();
  raw.rowwise() += biases_.transpose();
  return raw;
}

Eigen::MatrixXd AffineScoreModel::scores(const Eigen::MatrixXd& X) const {
  return raw_scores(X).array().min(clamp_bound_).max(-clamp_bound_);
}

std::unique_ptr<ScoreModel> AffineScoreModel::clone() const {
  return std::make_unique<AffineScoreModel>(*this);
}

double empirical_phi_risk(const ScoreModel& model, const LabeledDataset& data, const Loss& loss) {
  check_dimensions(model, data);
  return risk_of_scores(model.scores(data.features), signed_labels(data), loss);
}

ErmGradient phi_risk_gradient(const AffineScoreModel& model, const LabeledDataset& data,
                              const Loss& loss) {
  check_dimensions(model, data);
  const Eigen::MatrixXd Z = signed_labels(data);
  const Eigen::MatrixXd raw = model.raw_scores(data.features);
  const double B = model.clamp_bound();
  Eigen::MatrixXd inner(raw.rows(), raw.cols());  // d(risk)/d(raw score), n x K
  for (int i = 0; i < raw.rows(); ++i) {
    for (int k = 0; k < raw.cols(); ++k) {
      if (raw(i, k) > -B && raw(i, k) < B) {
        inner(i, k) = loss.derivative(Z(i, k) * raw(i, k)) * Z(i, k);
      } else {
        inner(i, k) = 0.0;  // clamp saturates: zero sensitivity
      }
    }
  }
  inner /= static_cast<double>(data.n());
  ErmGradient gradient;
  gradient.weights = inner.transpose() * data.features;
  gradient.biases = inner.colwise().sum();
  return gradient;
}

AffineScoreModel erm_step(const AffineScoreModel& model, const ErmGradient& gradient,
                          double step) {
  const double B = model.clamp_bound();
  Eigen::MatrixXd weights =
      (model.weights() - step * gradient.weights).array().min(B).max(-B);
  Eigen::VectorXd biases = (model.biases() - step * gradient.biases).array().min(B).max(-B);
  return AffineScoreModel(std::move(weights), std::move(biases), B);
}

AffineScoreModel fit_erm(const LabeledDataset& data, const ErmConfig& config, RandomSeed seed,
                         std::vector<double>* risk_trajectory) {
  (void)seed;  // descent is deterministic from zero initialization
  data.validate();
  if (data.n() < data.class_count) {
    throw ValidationError("need at least one row per class: n=" + std::to_string(data.n()) +
                          ", classes=" + std::to_string(data.class_count));
  }
  if (config.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (config.relative_tolerance <= 0) throw ValidationError("relative_tolerance must be > 0");
  if (config.initial_step <= 0) throw ValidationError("initial_step must be > 0");

  const Eigen::MatrixXd Z = signed_labels(data);
  const int K = data.class_count;
  const int d = data.d();
  const double B = config.clamp_bound;
  AffineScoreModel model(Eigen::MatrixXd::Zero(K, d), Eigen::VectorXd::Zero(K), B);

  double risk = risk_of_scores(model.scores(data.features), Z, config.loss);
  if (!std::isfinite(risk)) throw std::runtime_error("non-finite risk at initialization");
  if (risk_trajectory) {
    risk_trajectory->clear();
    risk_trajectory->push_back(risk);
  }
  ErmGradient gradient = phi_risk_gradient(model, data, config.loss);
  double last_step = config.initial_step;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const double gradient_norm2 =
        gradient.weights.squaredNorm() + gradient.biases.squaredNorm();
    if (gradient_norm2 == 0.0) break;  // saturated or exact stationary point

    // Cap the trial step so no raw score can cross more than one clamp width;
    // an unchecked first step can saturate every score at once, where the
    // clamp's zero gradient would freeze the descent permanently.
    double trial = 2.0 * last_step;
    const Eigen::MatrixXd displacement =
        (data.features * gradient.weights.transpose()).rowwise() +
        gradient.biases.transpose();
    const double max_displacement = displacement.array().abs().maxCoeff();
    if (max_displacement > 0.0 && trial * max_displacement > B) trial = B / max_displacement;

    bool accepted = false;
    AffineScoreModel candidate = model;
    double candidate_risk = risk;
    while (trial >= 1e-20) {
      candidate = erm_step(model, gradient, trial);
      candidate_risk = risk_of_scores(candidate.scores(data.features), Z, config.loss);
      if (!std::isfinite(candidate_risk)) {
        throw std::runtime_error("non-finite risk at iteration " + std::to_string(iteration));
      }
      const double decrease_model =
          (gradient.weights.array() * (model.weights() - candidate.weights()).array()).sum() +
          (gradient.biases.array() * (model.biases() - candidate.biases()).array()).sum();
      if (candidate_risk <= risk - 1e-4 * decrease_model) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;  // no productive step at any scale

    last_step = trial;
    const double relative_decrease = (risk - candidate_risk) / std::max(std::abs(risk), 1e-300);
    model = candidate;
    risk = candidate_risk;
    if (risk_trajectory) risk_trajectory->push_back(risk);
    gradient = phi_risk_gradient(model, data, config.loss);
    if (relative_decrease >= 0.0 && relative_decrease < config.relative_tolerance) break;
  }
  return model;
}

}  // namespace confset
