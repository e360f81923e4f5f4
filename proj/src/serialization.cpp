#include "confset/serialization.hpp"

#include <fstream>
#include <json.hpp>

#include "confset/erm.hpp"
#include "confset/error.hpp"
#include "confset/learners.hpp"

namespace confset {
namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& matrix) {
  json rows = json::array();
  for (int i = 0; i < matrix.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < matrix.cols(); ++j) row.push_back(matrix(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ValidationError("corrupted document: bad matrix");
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows[0].size());
  Eigen::MatrixXd matrix(n, d);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw ValidationError("corrupted document: ragged matrix");
    }
    for (int j = 0; j < d; ++j) matrix(i, j) = rows[i][j].get<double>();
  }
  return matrix;
}

json vector_to_json(const Eigen::VectorXd& vector) {
  json out = json::array();
  for (int i = 0; i < vector.size(); ++i) out.push_back(vector(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& values) {
  if (!values.is_array()) throw ValidationError("corrupted document: bad vector");
  Eigen::VectorXd vector(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) vector(static_cast<int>(i)) = values[i].get<double>();
  return vector;
}

json model_to_json(const ScoreModel& model);

std::unique_ptr<ScoreModel> model_from_json(const json& doc);

json model_to_json(const ScoreModel& model) {
  json doc;
  doc["kind"] = model.kind();
  if (const auto* affine = dynamic_cast<const AffineScoreModel*>(&model)) {
    doc["weights"] = matrix_to_json(affine->weights());
    doc["biases"] = vector_to_json(affine->biases());
    doc["clamp_bound"] = affine->clamp_bound();
  } else if (const auto* softmax = dynamic_cast<const SoftmaxModel*>(&model)) {
    doc["weights"] = matrix_to_json(softmax->weights());
    doc["biases"] = vector_to_json(softmax->biases());
  } else if (const auto* knn = dynamic_cast<const KnnModel*>(&model)) {
    doc["train_features"] = matrix_to_json(knn->train_features());
    doc["train_labels"] = knn->train_labels();
    doc["class_count"] = knn->class_count();
    doc["neighbor_count"] = knn->neighbor_count();
  } else if (const auto* generative = dynamic_cast<const GaussianGenerativeModel*>(&model)) {
    doc["means"] = matrix_to_json(generative->means());
    doc["variances"] = vector_to_json(generative->variances());
    doc["log_priors"] = vector_to_json(generative->log_priors());
  } else if (const auto* aggregated = dynamic_cast<const AggregatedScoreModel*>(&model)) {
    doc["weights"] = vector_to_json(aggregated->weights().weights);
    json bases = json::array();
    for (const auto& base : aggregated->base_models()) bases.push_back(model_to_json(*base));
    doc["base_models"] = std::move(bases);
  } else {
    throw ValidationError("cannot serialize score model of kind '" + model.kind() + "'");
  }
  return doc;
}

std::unique_ptr<ScoreModel> model_from_json(const json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "erm_affine") {
    return std::make_unique<AffineScoreModel>(matrix_from_json(doc.at("weights")),
                                              vector_from_json(doc.at("biases")),
                                              doc.at("clamp_bound").get<double>());
  }
  if (kind == "softmax") {
    return std::make_unique<SoftmaxModel>(matrix_from_json(doc.at("weights")),
                                          vector_from_json(doc.at("biases")));
  }
  if (kind == "knn") {
    return std::make_unique<KnnModel>(matrix_from_json(doc.at("train_features")),
                                      doc.at("train_labels").get<std::vector<int>>(),
                                      doc.at("class_count").get<int>(),
                                      doc.at("neighbor_count").get<int>());
  }
  if (kind == "gaussian_generative") {
    return std::make_unique<GaussianGenerativeModel>(matrix_from_json(doc.at("means")),
                                                     vector_from_json(doc.at("variances")),
                                                     vector_from_json(doc.at("log_priors")));
  }
  if (kind == "aggregated") {
    std::vector<std::unique_ptr<ScoreModel>> bases;
    for (const auto& base : doc.at("base_models")) bases.push_back(model_from_json(base));
    SimplexWeights weights{vector_from_json(doc.at("weights"))};
    return std::make_unique<AggregatedScoreModel>(std::move(bases), std::move(weights));
  }
  throw ValidationError("unknown score model kind '" + kind + "' in document");
}

json load_document(const std::string& path, const std::string& expected_type) {
  std::ifstream file(path);
  if (!file) throw ValidationError("missing file: " + path);
  json doc;
  try {
    file >> doc;
  } catch (const json::exception& error) {
    throw ValidationError("corrupted document " + path + ": " + error.what());
  }
  if (!doc.contains("schema_version")) {
    throw ValidationError("corrupted document " + path + ": no schema_version field");
  }
  if (doc["schema_version"].get<int>() != kSchemaVersion) {
    throw ValidationError("version mismatch in " + path + ": found " +
                          doc["schema_version"].dump() + ", expected " +
                          std::to_string(kSchemaVersion));
  }
  if (doc.value("type", "") != expected_type) {
    throw ValidationError("document " + path + " is not a " + expected_type);
  }
  return doc;
}

void write_document(const json& doc, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot open for writing: " + path);
  file << doc.dump(2) << '\n';
}

}  // namespace

void save_score_model(const ScoreModel& model, const std::string& path) {
  json doc = model_to_json(model);
  doc["schema_version"] = kSchemaVersion;
  doc["type"] = "score_model";
  write_document(doc, path);
}

std::unique_ptr<ScoreModel> load_score_model(const std::string& path) {
  return model_from_json(load_document(path, "score_model"));
}

void save_predictor(const ConfidenceSetPredictor& predictor, const std::string& path) {
  if (!predictor.score_model) throw ValidationError("predictor has no score model");
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["type"] = "confidence_set_predictor";
  doc["beta"] = predictor.beta;
  doc["jitter"] = predictor.jitter;
  doc["jitter_salt"] = predictor.jitter_salt;
  doc["score_model"] = model_to_json(*predictor.score_model);
  doc["calibrator"]["sorted_pool"] = predictor.calibrator.sorted_pool();
  doc["calibrator"]["pool_rows"] = predictor.calibrator.pool_rows();
  doc["calibrator"]["class_count"] = predictor.calibrator.class_count();
  write_document(doc, path);
}

ConfidenceSetPredictor load_predictor(const std::string& path) {
  const json doc = load_document(path, "confidence_set_predictor");
  ConfidenceSetPredictor predictor;
  predictor.score_model = model_from_json(doc.at("score_model"));
  predictor.beta = doc.at("beta").get<double>();
  predictor.jitter = doc.at("jitter").get<bool>();
  predictor.jitter_salt = doc.at("jitter_salt").get<std::uint64_t>();
  const json& calibrator = doc.at("calibrator");
  predictor.calibrator = EmpiricalG(calibrator.at("sorted_pool").get<std::vector<double>>(),
                                    calibrator.at("pool_rows").get<int>(),
                                    calibrator.at("class_count").get<int>());
  return predictor;
}

}  // namespace confset
