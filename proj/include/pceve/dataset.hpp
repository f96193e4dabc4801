#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pceve/image.hpp"
#include "pceve/masking.hpp"

namespace pceve {

struct Sample {
  std::string id;
  std::string image_ref;  // path as written in the manifest
  unsigned label = 0;
  PartSet parts;                      // only the parts this sample annotates
  std::vector<unsigned> vocab_index;  // parts[j] is vocabulary[vocab_index[j]]
  RasterImage image;

  // Local index of vocabulary part v, or -1 when the sample lacks it.
  int local_index(unsigned v) const;
};

struct Dataset {
  std::vector<std::string> classes;
  std::vector<std::string> vocabulary;
  std::vector<Sample> samples;
  std::filesystem::path root;  // image paths resolve against this

  unsigned num_classes() const noexcept { return static_cast<unsigned>(classes.size()); }
  unsigned num_parts() const noexcept { return static_cast<unsigned>(vocabulary.size()); }
  const Sample& find(const std::string& id) const;  // SampleNotFound
};

// Newline-delimited JSON: a header {"classes":[...],"part_vocabulary":[...]}
// followed by one record per sample:
// {"id":..,"image":..,"label":..,"parts":[{"name":..,"box":[x0,y0,x1,y1]}]}
Dataset parse_manifest(std::istream& in, const std::filesystem::path& root, bool load_images);
Dataset load_manifest(const std::filesystem::path& path, bool load_images = true);

nlohmann::json manifest_header(const Dataset& dataset);
nlohmann::json manifest_record(const Dataset& dataset, const Sample& sample);
void write_manifest(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace pceve
