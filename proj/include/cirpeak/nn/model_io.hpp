#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cirpeak/nn/model.hpp"

namespace cirpeak::nn {

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

/// `{spec, scaler, layers: [{kind, W, U (lstm), b}]}` with row-major
/// matrices. Only layers carrying parameters appear in `layers`.
std::string model_to_json(const Model& model);
/// Throws ParseError on malformed content or shapes that disagree with the
/// spec.
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace cirpeak::nn
