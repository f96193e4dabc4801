#include "pceve/model_config.hpp"

#include <fstream>

#include "pceve/error.hpp"

namespace pceve {

namespace {

PartAnnotation part_from_json(const nlohmann::json& p) {
  const auto box = p.at("box").get<std::vector<int>>();
  if (box.size() != 4) throw Error(ErrorCode::kManifest, "box needs 4 coordinates");
  return {p.at("name").get<std::string>(), {box[0], box[1], box[2], box[3]}};
}

nlohmann::json part_to_json(const PartAnnotation& p) {
  return {{"name", p.name}, {"box", {p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max}}};
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifest, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::unique_ptr<AdditiveToyModel> additive_model_from_json(const nlohmann::json& j) {
  return guarded("additive model config", [&] {
    std::vector<PartAnnotation> parts;
    std::vector<std::vector<double>> weights;
    for (const auto& p : j.at("parts")) {
      parts.push_back(part_from_json(p));
      weights.push_back(p.at("weights").get<std::vector<double>>());
    }
    return std::make_unique<AdditiveToyModel>(
        j.at("classes").get<std::vector<std::string>>(), PartSet(std::move(parts)),
        std::move(weights), j.at("bias").get<std::vector<double>>(),
        j.value("threshold", kDefaultPresenceThreshold));
  });
}

std::unique_ptr<TableToyModel> table_model_from_json(const nlohmann::json& j) {
  return guarded("table model config", [&] {
    std::vector<PartAnnotation> parts;
    for (const auto& p : j.at("parts")) parts.push_back(part_from_json(p));
    const auto k = static_cast<unsigned>(parts.size());
    if (k == 0 || k > kMaxExactParts) {
      throw Error(ErrorCode::kPartCountOutOfRange, "table model needs 1..24 parts");
    }
    std::vector<LogitVector> table(std::size_t{1} << k);
    std::vector<bool> seen(table.size(), false);
    for (const auto& [key, row] : j.at("table").items()) {
      const Coalition c = Coalition::from_string(key);
      if (c.width() != k) throw Error(ErrorCode::kInvalidCoalition, "table key '" + key + "'");
      table[c.bits()] = row.get<LogitVector>();
      seen[c.bits()] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) {
        throw Error(ErrorCode::kManifest,
                    "table misses coalition " + Coalition(i, k).to_string());
      }
    }
    return std::make_unique<TableToyModel>(j.at("classes").get<std::vector<std::string>>(),
                                           PartSet(std::move(parts)), std::move(table),
                                           j.value("threshold", kDefaultPresenceThreshold));
  });
}

nlohmann::json to_json(const AdditiveToyModel& model) {
  nlohmann::json parts = nlohmann::json::array();
  const auto& boxes = model.decoder().boxes();
  for (unsigned k = 0; k < boxes.size(); ++k) {
    auto p = part_to_json(boxes[k]);
    p["weights"] = model.weights()[k];
    parts.push_back(std::move(p));
  }
  return {{"classes", model.class_names()},
          {"threshold", model.decoder().threshold()},
          {"bias", model.bias()},
          {"parts", parts}};
}

nlohmann::json to_json(const TableToyModel& model) {
  nlohmann::json parts = nlohmann::json::array();
  const auto& boxes = model.decoder().boxes();
  for (unsigned k = 0; k < boxes.size(); ++k) parts.push_back(part_to_json(boxes[k]));
  nlohmann::json table = nlohmann::json::object();
  for (std::size_t i = 0; i < model.table().size(); ++i) {
    table[Coalition(i, boxes.size()).to_string()] = model.table()[i];
  }
  return {{"classes", model.class_names()},
          {"threshold", model.decoder().threshold()},
          {"parts", parts},
          {"table", table}};
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kManifest, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace pceve
