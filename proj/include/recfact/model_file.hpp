#pragma once

#include <string>

#include "recfact/predictor.hpp"

namespace recfact {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON document. `created` (ISO-8601 UTC) is the only field that
// differs between identical runs; pass an empty string to omit it.
std::string save_model(const Predictor& model, const std::string& created);
PredictorPtr load_model(const std::string& text);

void save_model_file(const Predictor& model, const std::string& path);
PredictorPtr load_model_file(const std::string& path);

std::string utc_timestamp();

} // namespace recfact
