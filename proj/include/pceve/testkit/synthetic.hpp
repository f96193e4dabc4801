#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "pceve/dataset.hpp"
#include "pceve/value_function.hpp"

namespace pceve::testkit {

struct SyntheticOptions {
  int image_size = 64;
  int channels = 3;
  // Chance that a non-discriminative part is drawn (and annotated).
  double common_part_probability = 0.85;
  double discriminative_weight = 2.0;
  double common_weight = 0.1;
};

// Part-structured images on a fixed grid. Class c always shows its
// discriminative part and never another class's; the remaining parts appear at
// random. Parts are noise textures on a flat background; undrawn parts are
// left out of the annotations.
struct SyntheticDataset {
  std::uint64_t seed = 0;
  Dataset dataset;
  PartSet layout;
  std::vector<unsigned> discriminative_part;  // per class
  nlohmann::json model_config;                // additive toy model matched to the layout

  std::unique_ptr<AdditiveToyModel> model() const;
};

// Requires 1 <= K <= 8 and 2 <= C <= K.
SyntheticDataset make_synthetic_dataset(std::uint64_t seed, unsigned num_parts,
                                        unsigned num_classes, unsigned n_per_class,
                                        const SyntheticOptions& options = {});

// Writes images/<id>.png, manifest.jsonl and model.json under `dir`.
void write_synthetic_dataset(const SyntheticDataset& synthetic, const std::filesystem::path& dir);

// Copy of `dataset` with every box edge moved by a uniform offset in
// [-max_px, max_px], clamped to the image.
Dataset jitter_annotations(const Dataset& dataset, int max_px, std::uint64_t seed);

}  // namespace pceve::testkit
