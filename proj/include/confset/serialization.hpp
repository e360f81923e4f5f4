#pragma once

#include <memory>
#include <string>

#include "confset/pipeline.hpp"
#include "confset/score_model.hpp"

namespace confset {

// Versioned human-readable JSON documents. Reals are written with
// round-trip precision, so reloaded models predict bit-identically.
inline constexpr int kSchemaVersion = 1;

void save_score_model(const ScoreModel& model, const std::string& path);
std::unique_ptr<ScoreModel> load_score_model(const std::string& path);

void save_predictor(const ConfidenceSetPredictor& predictor, const std::string& path);
ConfidenceSetPredictor load_predictor(const std::string& path);

}  // namespace confset
