#include "pceve/testkit/games.hpp"

#include <cmath>

#include "pceve/error.hpp"

namespace pceve::testkit {

ScalarGame TableGame::scalar(unsigned class_index) const {
  return [this, class_index](std::uint64_t bits) { return table.at(bits).at(class_index); };
}

std::uint8_t random_byte(std::mt19937_64& rng) { return static_cast<std::uint8_t>(rng() >> 56); }

double random_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double random_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * random_unit(rng);
}

TableGame random_table_game(std::mt19937_64& rng, unsigned num_parts, unsigned num_classes) {
  TableGame g;
  g.num_parts = num_parts;
  g.table.resize(std::size_t{1} << num_parts);
  for (auto& row : g.table) {
    row.resize(num_classes);
    for (double& v : row) v = random_uniform(rng, -10.0, 10.0);
  }
  return g;
}

TableGame make_dummy(TableGame game, unsigned part) {
  const std::uint64_t bit = std::uint64_t{1} << part;
  for (std::uint64_t s = 0; s < game.table.size(); ++s) {
    if ((s & bit) != 0) game.table[s] = game.table[s & ~bit];
  }
  return game;
}

TableGame make_symmetric(TableGame game, unsigned i, unsigned j) {
  const std::uint64_t bi = std::uint64_t{1} << i;
  const std::uint64_t bj = std::uint64_t{1} << j;
  for (std::uint64_t s = 0; s < game.table.size(); ++s) {
    if ((s & bj) != 0 && (s & bi) == 0) game.table[s] = game.table[(s & ~bj) | bi];
  }
  return game;
}

TableGame linear_combination(double a, const TableGame& f, double b, const TableGame& g) {
  TableGame out = f;
  for (std::size_t s = 0; s < out.table.size(); ++s) {
    for (std::size_t c = 0; c < out.table[s].size(); ++c) {
      out.table[s][c] = a * f.table[s][c] + b * g.table[s][c];
    }
  }
  return out;
}

TableGame additive_game(const std::vector<std::vector<double>>& weights,
                        const std::vector<double>& bias) {
  TableGame g;
  g.num_parts = static_cast<unsigned>(weights.size());
  g.table.resize(std::size_t{1} << g.num_parts);
  for (std::uint64_t s = 0; s < g.table.size(); ++s) {
    g.table[s] = bias;
    for (unsigned k = 0; k < g.num_parts; ++k) {
      if (((s >> k) & 1U) == 0) continue;
      for (std::size_t c = 0; c < bias.size(); ++c) g.table[s][c] += weights[k][c];
    }
  }
  return g;
}

RasterImage noise_image(std::mt19937_64& rng, int width, int height, int channels) {
  RasterImage img(width, height, channels);
  for (auto& px : img.pixels()) px = random_byte(rng);
  return img;
}

std::vector<std::string> default_part_names(unsigned num_parts) {
  static const std::vector<std::string> kNames = {"hair", "eye",  "nose", "mouth",
                                                  "ear",  "hand", "foot", "body"};
  std::vector<std::string> out;
  for (unsigned k = 0; k < num_parts; ++k) {
    out.push_back(k < kNames.size() ? kNames[k] : "part" + std::to_string(k));
  }
  return out;
}

std::vector<std::string> default_class_names(unsigned num_classes) {
  if (num_classes == 2) return {"female", "male"};
  std::vector<std::string> out;
  for (unsigned c = 0; c < num_classes; ++c) out.push_back("class" + std::to_string(c));
  return out;
}

PartSet grid_layout(unsigned num_parts, int width, int height, int margin,
                    const std::vector<std::string>& names) {
  const auto cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_parts))));
  const int rows = (static_cast<int>(num_parts) + cols - 1) / cols;
  const int cell_w = width / cols;
  const int cell_h = height / rows;
  if (cell_w <= 2 * margin || cell_h <= 2 * margin) {
    throw Error(ErrorCode::kBoxOutOfBounds, "image too small for the grid layout");
  }
  const auto labels = names.empty() ? default_part_names(num_parts) : names;
  std::vector<PartAnnotation> parts;
  for (unsigned k = 0; k < num_parts; ++k) {
    const int col = static_cast<int>(k) % cols;
    const int row = static_cast<int>(k) / cols;
    parts.push_back({labels.at(k),
                     {col * cell_w + margin, row * cell_h + margin, (col + 1) * cell_w - margin,
                      (row + 1) * cell_h - margin}});
  }
  return PartSet(std::move(parts));
}

GameHarness make_game_harness(std::mt19937_64& rng, const TableGame& game, int size) {
  PartSet parts = grid_layout(game.num_parts, size, size);
  RasterImage image = noise_image(rng, size, size, 1);
  std::vector<std::string> classes;
  for (unsigned c = 0; c < game.num_classes(); ++c) classes.push_back("c" + std::to_string(c));
  TableToyModel model(std::move(classes), parts, game.table);
  return {std::move(image), std::move(parts), std::move(model)};
}

}  // namespace pceve::testkit
