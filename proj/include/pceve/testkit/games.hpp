#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pceve/image.hpp"
#include "pceve/masking.hpp"
#include "pceve/testkit/oracle.hpp"
#include "pceve/value_function.hpp"

namespace pceve::testkit {

// A K-player game with a logit vector per coalition.
struct TableGame {
  unsigned num_parts = 0;
  std::vector<LogitVector> table;  // indexed by coalition bits

  unsigned num_classes() const {
    return table.empty() ? 0U : static_cast<unsigned>(table.front().size());
  }
  ScalarGame scalar(unsigned class_index) const;
};

// Values uniform in [-10, 10].
TableGame random_table_game(std::mt19937_64& rng, unsigned num_parts, unsigned num_classes);

// f(S) := f(S \ {part}); `part` becomes a dummy player.
TableGame make_dummy(TableGame game, unsigned part);
// f(S) := f(S with j swapped for i when exactly one of them is present); i and
// j become interchangeable.
TableGame make_symmetric(TableGame game, unsigned i, unsigned j);
TableGame linear_combination(double a, const TableGame& f, double b, const TableGame& g);
// Additive game: table[S][c] = bias[c] + sum_{k in S} weights[k][c].
TableGame additive_game(const std::vector<std::vector<double>>& weights,
                        const std::vector<double>& bias);

// Uniform byte in [0, 255] and real in [0, 1) drawn from raw engine output, so
// streams do not depend on the standard library's distributions.
std::uint8_t random_byte(std::mt19937_64& rng);
double random_unit(std::mt19937_64& rng);
double random_uniform(std::mt19937_64& rng, double lo, double hi);

// Full-range per-pixel noise: any box of a few dozen pixels reads as present
// for the presence decoder.
RasterImage noise_image(std::mt19937_64& rng, int width, int height, int channels);

// K non-overlapping boxes on a near-square grid, each inset by `margin`.
PartSet grid_layout(unsigned num_parts, int width, int height, int margin = 3,
                    const std::vector<std::string>& names = {});

std::vector<std::string> default_part_names(unsigned num_parts);
std::vector<std::string> default_class_names(unsigned num_classes);

// Noise image with grid boxes, plus a TableToyModel whose detector boxes are
// that same grid, so the engine sees exactly `game`.
struct GameHarness {
  RasterImage image;
  PartSet parts;
  TableToyModel model;
};
GameHarness make_game_harness(std::mt19937_64& rng, const TableGame& game, int size = 64);

}  // namespace pceve::testkit
