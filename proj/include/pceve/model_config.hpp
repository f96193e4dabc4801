#pragma once

#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "pceve/value_function.hpp"

namespace pceve {

// Toy model config files.
//
// Additive:
//   {"classes": [...], "threshold": 0.9, "bias": [b_c...],
//    "parts": [{"name": "hair", "box": [x0, y0, x1, y1], "weights": [w_c...]}, ...]}
// Table:
//   {"classes": [...], "threshold": 0.9, "parts": [{"name": .., "box": [..]}, ...],
//    "table": {"000": [...], "100": [...], ...}}   keys: part 0 leftmost
// "threshold" is optional.

std::unique_ptr<AdditiveToyModel> additive_model_from_json(const nlohmann::json& j);
std::unique_ptr<TableToyModel> table_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AdditiveToyModel& model);
nlohmann::json to_json(const TableToyModel& model);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace pceve
