#include "confset/superlearner.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "confset/error.hpp"

namespace confset {

void SimplexWeights::validate() const {
  if (weights.size() < 1) throw ValidationError("empty weight vector");
  if (!weights.allFinite()) throw ValidationError("non-finite simplex weight");
  if ((weights.array() < 0).any()) throw ValidationError("negative simplex weight");
  if (std::abs(weights.sum() - 1.0) > 1e-10) {
    throw ValidationError("simplex weights must sum to 1");
  }
}

AggregatedScoreModel::AggregatedScoreModel(std::vector<std::unique_ptr<ScoreModel>> base_models,
                                           SimplexWeights weights)
    : base_models_(std::move(base_models)), weights_(std::move(weights)) {
  if (base_models_.empty()) throw ValidationError("aggregate needs at least one base model");
  if (static_cast<int>(base_models_.size()) != weights_.weights.size()) {
    throw ValidationError("base model count does not match weight count");
  }
  weights_.validate();
}

AggregatedScoreModel::AggregatedScoreModel(const AggregatedScoreModel& other)
    : weights_(other.weights_) {
  base_models_.reserve(other.base_models_.size());
  for (const auto& model : other.base_models_) base_models_.push_back(model->clone());
}

Eigen::MatrixXd AggregatedScoreModel::scores(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd combined;
  for (std::size_t m = 0; m < base_models_.size(); ++m) {
    const double weight = weights_.weights(static_cast<int>(m));
    if (combined.size() == 0) {
      combined = weight * base_models_[m]->scores(X);
    } else {
      combined += weight * base_models_[m]->scores(X);
    }
  }
  return combined;
}

std::unique_ptr<ScoreModel> AggregatedScoreModel::clone() const {
  return std::make_unique<AggregatedScoreModel>(*this);
}

CvRiskTable build_cv_table(const LabeledDataset& data,
                           const std::vector<ScoreAlgorithm>& algorithms,
                           const FoldPartition& partition) {
  data.validate();
  if (algorithms.empty()) throw ValidationError("empty algorithm list");
  if (partition.n() != data.n()) throw ValidationError("partition size does not match data");
  CvRiskTable table;
  table.class_count = data.class_count;
  table.scores.resize(partition.V);
  table.fold_labels.resize(partition.V);
  for (int fold = 1; fold <= partition.V; ++fold) {
    const auto held_out = partition.fold_rows(fold);
    const auto complement = partition.complement_rows(fold);
    const LabeledDataset train = select_rows(data, complement);
    const LabeledDataset evaluation = select_rows(data, held_out);
    table.fold_labels[fold - 1] = evaluation.labels;
    table.scores[fold - 1].reserve(algorithms.size());
    for (const auto& algorithm : algorithms) {
      const auto model = algorithm.fit(train);
      table.scores[fold - 1].push_back(model->scores(evaluation.features));
    }
  }
  return table;
}

namespace {

double fold_risk(const Eigen::MatrixXd& scores, const std::vector<int>& labels,
                 const Loss& loss) {
  double total = 0.0;
  for (int i = 0; i < scores.rows(); ++i) {
    for (int k = 0; k < scores.cols(); ++k) {
      const double z = labels[i] == k + 1 ? 1.0 : -1.0;
      total += loss.value(z * scores(i, k));
    }
  }
  return total / scores.rows();
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& parts,
                        const Eigen::VectorXd& weights) {
  Eigen::MatrixXd combined = weights(0) * parts[0];
  for (std::size_t m = 1; m < parts.size(); ++m) {
    combined += weights(static_cast<int>(m)) * parts[m];
  }
  return combined;
}

// d(cv risk)/d(weight_m): mean over folds of the per-row sum of
// phi'(z * combined) * z * score_m.
Eigen::VectorXd cv_risk_gradient(const CvRiskTable& table, const Eigen::VectorXd& weights,
                                 const Loss& loss) {
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(weights.size());
  for (int v = 0; v < table.fold_count(); ++v) {
    const Eigen::MatrixXd combined = combine(table.scores[v], weights);
    const auto& labels = table.fold_labels[v];
    const double scale = 1.0 / (combined.rows() * table.fold_count());
    for (int i = 0; i < combined.rows(); ++i) {
      for (int k = 0; k < combined.cols(); ++k) {
        const double z = labels[i] == k + 1 ? 1.0 : -1.0;
        const double slope = loss.derivative(z * combined(i, k)) * z * scale;
        for (int m = 0; m < weights.size(); ++m) {
          gradient(m) += slope * table.scores[v][static_cast<std::size_t>(m)](i, k);
        }
      }
    }
  }
  return gradient;
}

void enumerate_compositions(int total, int parts, std::vector<int>& current,
                            const std::function<void(const std::vector<int>&)>& visit) {
  if (parts == 1) {
    current.push_back(total);
    visit(current);
    current.pop_back();
    return;
  }
  for (int head = 0; head <= total; ++head) {
    current.push_back(head);
    enumerate_compositions(total - head, parts - 1, current, visit);
    current.pop_back();
  }
}

}  // namespace

double cv_phi_risk(const CvRiskTable& table, const SimplexWeights& weights, const Loss& loss) {
  weights.validate();
  if (weights.weights.size() != table.algorithm_count()) {
    throw ValidationError("weight count does not match table");
  }
  double total = 0.0;
  for (int v = 0; v < table.fold_count(); ++v) {
    total += fold_risk(combine(table.scores[v], weights.weights), table.fold_labels[v], loss);
  }
  return total / table.fold_count();
}

SimplexWeights fit_superlearner_weights(const CvRiskTable& table, const Loss& loss,
                                        WeightMode mode, int grid_resolution) {
  const int M = table.algorithm_count();
  if (M < 1) throw ValidationError("empty cross-validation table");

  SimplexWeights best;
  if (mode == WeightMode::grid) {
    if (grid_resolution < 1) throw ValidationError("grid resolution must be >= 1");
    double best_risk = std::numeric_limits<double>::infinity();
    std::vector<int> current;
    enumerate_compositions(grid_resolution, M, current, [&](const std::vector<int>& counts) {
      SimplexWeights candidate;
      candidate.weights.resize(M);
      for (int m = 0; m < M; ++m) {
        candidate.weights(m) = static_cast<double>(counts[m]) / grid_resolution;
      }
      const double risk = cv_phi_risk(table, candidate, loss);
      if (risk < best_risk) {
        best_risk = risk;
        best = candidate;
      }
    });
    return best;
  }

  // Exponentiated gradient descent with a backtracking step, uniform start.
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(M, 1.0 / M);
  SimplexWeights wrapped{weights};
  double risk = cv_phi_risk(table, wrapped, loss);
  double last_step = 1.0;
  for (int iteration = 0; iteration < 5000; ++iteration) {
    const Eigen::VectorXd gradient = cv_risk_gradient(table, weights, loss);
    double trial = 2.0 * last_step;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_risk = risk;
    while (trial >= 1e-18) {
      // Shift by the smallest gradient entry so every multiplier is exp of a
      // non-positive number: immune to overflow at any step size.
      const Eigen::ArrayXd shifted = -trial * (gradient.array() - gradient.minCoeff());
      candidate = (weights.array() * shifted.exp()).matrix();
      const double normalizer = candidate.sum();
      if (!(normalizer > 0.0) || !candidate.allFinite()) {
        trial *= 0.5;
        continue;
      }
      candidate /= normalizer;
      candidate_risk = cv_phi_risk(table, SimplexWeights{candidate}, loss);
      if (std::isfinite(candidate_risk) && candidate_risk < risk) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    last_step = trial;
    const double relative_decrease = (risk - candidate_risk) / std::max(std::abs(risk), 1e-300);
    weights = candidate;
    risk = candidate_risk;
    if (relative_decrease < 1e-10) break;
  }

  // Vertex guard: the returned point must never lose to a single algorithm.
  best.weights = weights;
  double best_risk = risk;
  for (int m = 0; m < M; ++m) {
    SimplexWeights vertex;
    vertex.weights = Eigen::VectorXd::Zero(M);
    vertex.weights(m) = 1.0;
    const double vertex_risk = cv_phi_risk(table, vertex, loss);
    if (vertex_risk < best_risk) {
      best_risk = vertex_risk;
      best = vertex;
    }
  }
  return best;
}

AggregationResult fit_aggregated_model(const LabeledDataset& data,
                                       const std::vector<ScoreAlgorithm>& algorithms,
                                       const AggregationConfig& config, RandomSeed seed) {
  if (config.folds < 2) throw ValidationError("fold count must be >= 2");
  const FoldPartition partition = vfold_partition(data.n(), config.folds, seed);
  const CvRiskTable table = build_cv_table(data, algorithms, partition);

  AggregationResult result;
  result.weights = fit_superlearner_weights(table, config.loss, config.mode,
                                            config.grid_resolution);
  result.aggregate_cv_risk = cv_phi_risk(table, result.weights, config.loss);
  result.vertex_risks.resize(static_cast<int>(algorithms.size()));
  for (std::size_t m = 0; m < algorithms.size(); ++m) {
    SimplexWeights vertex;
    vertex.weights = Eigen::VectorXd::Zero(static_cast<int>(algorithms.size()));
    vertex.weights(static_cast<int>(m)) = 1.0;
    result.vertex_risks(static_cast<int>(m)) = cv_phi_risk(table, vertex, config.loss);
  }

  std::vector<std::unique_ptr<ScoreModel>> base_models;
  if (config.aggregate_fold_models) {
    // Component m = uniform average of its V fold-trained models.
    for (std::size_t m = 0; m < algorithms.size(); ++m) {
      std::vector<std::unique_ptr<ScoreModel>> fold_models;
      for (int fold = 1; fold <= partition.V; ++fold) {
        const LabeledDataset train = select_rows(data, partition.complement_rows(fold));
        fold_models.push_back(algorithms[m].fit(train));
      }
      SimplexWeights uniform;
      uniform.weights = Eigen::VectorXd::Constant(partition.V, 1.0 / partition.V);
      base_models.push_back(
          std::make_unique<AggregatedScoreModel>(std::move(fold_models), uniform));
    }
  } else {
    for (const auto& algorithm : algorithms) base_models.push_back(algorithm.fit(data));
  }
  result.model =
      std::make_unique<AggregatedScoreModel>(std::move(base_models), result.weights);
  return result;
}

}  // namespace confset
