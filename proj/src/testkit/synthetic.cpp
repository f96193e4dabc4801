#include "pceve/testkit/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "pceve/error.hpp"
#include "pceve/model_config.hpp"
#include "pceve/testkit/games.hpp"

namespace pceve::testkit {

namespace {

int random_offset(std::mt19937_64& rng, int max_px) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(2 * max_px + 1)) - max_px;
}

nlohmann::json matched_model_config(const PartSet& layout, const std::vector<std::string>& classes,
                                    const std::vector<unsigned>& discriminative,
                                    const SyntheticOptions& options) {
  const auto num_classes = static_cast<unsigned>(classes.size());
  nlohmann::json parts = nlohmann::json::array();
  for (unsigned k = 0; k < layout.size(); ++k) {
    std::vector<double> weights(num_classes, options.common_weight);
    const auto owner = std::find(discriminative.begin(), discriminative.end(), k);
    if (owner != discriminative.end()) {
      const auto c_owner = static_cast<unsigned>(owner - discriminative.begin());
      for (unsigned c = 0; c < num_classes; ++c) {
        weights[c] = c == c_owner ? options.discriminative_weight
                                  : -options.discriminative_weight / (num_classes - 1);
      }
    }
    const auto& p = layout[k];
    parts.push_back({{"name", p.name},
                     {"box", {p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max}},
                     {"weights", weights}});
  }
  // A small bias towards later classes breaks the tie on part-free images.
  std::vector<double> bias(num_classes);
  for (unsigned c = 0; c < num_classes; ++c) bias[c] = 0.05 * c;
  return {{"classes", classes},
          {"threshold", kDefaultPresenceThreshold},
          {"bias", bias},
          {"parts", parts}};
}

}  // namespace

std::unique_ptr<AdditiveToyModel> SyntheticDataset::model() const {
  return additive_model_from_json(model_config);
}

SyntheticDataset make_synthetic_dataset(std::uint64_t seed, unsigned num_parts,
                                        unsigned num_classes, unsigned n_per_class,
                                        const SyntheticOptions& options) {
  if (num_parts == 0 || num_parts > 8) {
    throw Error(ErrorCode::kPartCountOutOfRange, "synthetic datasets use 1..8 parts");
  }
  if (num_classes < 2 || num_classes > num_parts) {
    throw Error(ErrorCode::kUsage, "synthetic datasets need 2 <= classes <= parts");
  }
  SyntheticDataset out;
  out.seed = seed;
  const int size = options.image_size;
  out.layout = grid_layout(num_parts, size, size);
  out.dataset.classes = default_class_names(num_classes);
  out.dataset.vocabulary = out.layout.names();
  for (unsigned c = 0; c < num_classes; ++c) {
    out.discriminative_part.push_back(c * (num_parts - 1) / (num_classes - 1));
  }
  out.model_config =
      matched_model_config(out.layout, out.dataset.classes, out.discriminative_part, options);

  std::mt19937_64 rng(seed);
  std::size_t next_id = 0;
  for (unsigned i = 0; i < n_per_class; ++i) {
    for (unsigned c = 0; c < num_classes; ++c) {
      Sample s;
      char id[32];
      std::snprintf(id, sizeof id, "s%05zu", next_id++);
      s.id = id;
      s.image_ref = "images/" + s.id + ".png";
      s.label = c;

      const std::uint8_t background = static_cast<std::uint8_t>(96 + random_byte(rng) % 65);
      RasterImage img(size, size, options.channels);
      std::fill(img.pixels().begin(), img.pixels().end(), background);

      std::vector<PartAnnotation> annotations;
      for (unsigned k = 0; k < num_parts; ++k) {
        const auto owner =
            std::find(out.discriminative_part.begin(), out.discriminative_part.end(), k);
        bool drawn;
        if (owner != out.discriminative_part.end()) {
          drawn = static_cast<unsigned>(owner - out.discriminative_part.begin()) == c;
        } else {
          drawn = random_unit(rng) < options.common_part_probability;
        }
        if (!drawn) continue;
        const Box& box = out.layout[k].box;
        for (int y = box.y_min; y < box.y_max; ++y) {
          for (int x = box.x_min; x < box.x_max; ++x) {
            for (int ch = 0; ch < options.channels; ++ch) img.at(x, y, ch) = random_byte(rng);
          }
        }
        annotations.push_back(out.layout[k]);
        s.vocab_index.push_back(k);
      }
      s.parts = PartSet(std::move(annotations));
      s.image = std::move(img);
      out.dataset.samples.push_back(std::move(s));
    }
  }
  return out;
}

void write_synthetic_dataset(const SyntheticDataset& synthetic, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  for (const auto& s : synthetic.dataset.samples) write_image(dir / s.image_ref, s.image);
  write_manifest(synthetic.dataset, dir / "manifest.jsonl");
  write_json_file(dir / "model.json", synthetic.model_config);
}

Dataset jitter_annotations(const Dataset& dataset, int max_px, std::uint64_t seed) {
  Dataset out = dataset;
  if (max_px <= 0) return out;
  std::mt19937_64 rng(seed);
  for (auto& s : out.samples) {
    std::vector<PartAnnotation> parts = s.parts.parts();
    for (auto& p : parts) {
      Box& b = p.box;
      const int w = s.image.width();
      const int h = s.image.height();
      b.x_min = std::clamp(b.x_min + random_offset(rng, max_px), 0, w - 1);
      b.y_min = std::clamp(b.y_min + random_offset(rng, max_px), 0, h - 1);
      b.x_max = std::clamp(b.x_max + random_offset(rng, max_px), b.x_min + 1, w);
      b.y_max = std::clamp(b.y_max + random_offset(rng, max_px), b.y_min + 1, h);
    }
    s.parts = PartSet(std::move(parts));
  }
  return out;
}

}  // namespace pceve::testkit
