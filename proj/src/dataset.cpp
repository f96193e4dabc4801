#include "pceve/dataset.hpp"

#include <fstream>
#include <set>

#include "pceve/error.hpp"

namespace pceve {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void require_unique(const std::vector<std::string>& names, const char* what) {
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) {
    throw Error(ErrorCode::kManifest, std::string("duplicate entry in ") + what);
  }
}

Sample parse_record(const nlohmann::json& j, const Dataset& ds, std::size_t line) {
  const std::string where = "manifest line " + std::to_string(line) + ": ";
  Sample s;
  s.id = j.at("id").get<std::string>();
  s.image_ref = j.at("image").get<std::string>();
  const auto label = j.at("label").get<std::string>();
  const int label_index = index_of(ds.classes, label);
  if (label_index < 0) throw Error(ErrorCode::kManifest, where + "unknown label '" + label + "'");
  s.label = static_cast<unsigned>(label_index);

  std::vector<PartAnnotation> parts;
  for (const auto& p : j.at("parts")) {
    PartAnnotation a;
    a.name = p.at("name").get<std::string>();
    const auto box = p.at("box").get<std::vector<int>>();
    if (box.size() != 4) throw Error(ErrorCode::kManifest, where + "box needs 4 coordinates");
    a.box = {box[0], box[1], box[2], box[3]};
    const int v = index_of(ds.vocabulary, a.name);
    if (v < 0) {
      throw Error(ErrorCode::kManifest, where + "part '" + a.name + "' not in part_vocabulary");
    }
    s.vocab_index.push_back(static_cast<unsigned>(v));
    parts.push_back(std::move(a));
  }
  if (parts.empty()) throw Error(ErrorCode::kManifest, where + "sample '" + s.id + "' has no parts");
  try {
    s.parts = PartSet(std::move(parts));
  } catch (const Error& e) {
    throw Error(e.code(), where + e.what());
  }
  return s;
}

}  // namespace

int Sample::local_index(unsigned v) const {
  for (std::size_t j = 0; j < vocab_index.size(); ++j) {
    if (vocab_index[j] == v) return static_cast<int>(j);
  }
  return -1;
}

const Sample& Dataset::find(const std::string& id) const {
  for (const auto& s : samples) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::kSampleNotFound, "no sample with id '" + id + "'");
}

Dataset parse_manifest(std::istream& in, const std::filesystem::path& root, bool load_images) {
  Dataset ds;
  ds.root = root;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kManifest, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        ds.classes = j.at("classes").get<std::vector<std::string>>();
        ds.vocabulary = j.at("part_vocabulary").get<std::vector<std::string>>();
        require_unique(ds.classes, "classes");
        require_unique(ds.vocabulary, "part_vocabulary");
        if (ds.classes.size() < 2) throw Error(ErrorCode::kManifest, "need at least 2 classes");
        if (ds.vocabulary.empty()) throw Error(ErrorCode::kManifest, "empty part_vocabulary");
        have_header = true;
        continue;
      }
      Sample s = parse_record(j, ds, line_no);
      if (!ids.insert(s.id).second) {
        throw Error(ErrorCode::kManifest, "duplicate sample id '" + s.id + "'");
      }
      if (load_images) {
        s.image = read_image(root / s.image_ref);
        s.parts.check_bounds(s.image.width(), s.image.height());
      }
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kManifest, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kManifest, "manifest has no header record");
  return ds;
}

Dataset load_manifest(const std::filesystem::path& path, bool load_images) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path(), load_images);
}

nlohmann::json manifest_header(const Dataset& dataset) {
  return {{"classes", dataset.classes}, {"part_vocabulary", dataset.vocabulary}};
}

nlohmann::json manifest_record(const Dataset& dataset, const Sample& sample) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : sample.parts.parts()) {
    parts.push_back({{"name", p.name}, {"box", {p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max}}});
  }
  return {{"id", sample.id},
          {"image", sample.image_ref},
          {"label", dataset.classes.at(sample.label)},
          {"parts", parts}};
}

void write_manifest(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << manifest_header(dataset).dump() << '\n';
  for (const auto& s : dataset.samples) out << manifest_record(dataset, s).dump() << '\n';
}

}  // namespace pceve
