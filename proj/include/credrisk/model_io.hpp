#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "credrisk/models.hpp"

namespace credrisk {

// Self-describing JSON document: kind, hyperparameters, seed, feature names,
// standardization statistics and the fitted parameters. Doubles are written
// in shortest round-trip form, so load -> score is bit-identical.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace credrisk
