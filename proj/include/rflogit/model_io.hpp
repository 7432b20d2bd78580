#pragma once

#include "rflogit/pipeline.hpp"

#include <filesystem>
#include <string>

namespace rflogit {

inline constexpr int kModelSchemaVersion = 1;

/// JSON text of a fitted model. Doubles are written in shortest round-trip
/// form, so save followed by load reproduces every field bit for bit.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace rflogit
