#include <random>

#include <gtest/gtest.h>

#include "pceve/image.hpp"
#include "pceve/testkit/games.hpp"
#include "pceve/testkit/oracle.hpp"
#include "pceve/testkit/synthetic.hpp"
#include "test_util.hpp"

namespace pceve {
namespace {

TEST(Testkit, TwoPlayerExample) {
  const auto f = [](std::uint64_t b) {
    static const double v[] = {0, 1, 1, 4};
    return v[b];
  };
  EXPECT_EQ(testkit::oracle_shapley_permutation(f, 2), (std::vector<double>{2, 2}));
}

TEST(Testkit, AdditiveGameOracle) {
  const auto game = testkit::additive_game({{5}, {-3}}, {0});
  EXPECT_EQ(testkit::oracle_shapley_permutation(game.scalar(0), 2), (std::vector<double>{5, -3}));
}

TEST(Testkit, AppendedDummyLeavesOthersUnchanged) {
  std::mt19937_64 rng(1);
  const auto base = testkit::random_table_game(rng, 3, 1);
  testkit::TableGame wider{4, {}};
  for (std::uint64_t b = 0; b < 16; ++b) wider.table.push_back(base.table[b & 7]);
  const auto a = testkit::oracle_shapley_permutation_exact(base.scalar(0), 3);
  const auto b = testkit::oracle_shapley_permutation_exact(wider.scalar(0), 4);
  EXPECT_EQ(b[3], 0);
  for (unsigned k = 0; k < 3; ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(Testkit, GeneratorsAreWellFormed) {
  std::mt19937_64 rng(2);
  const auto g = testkit::random_table_game(rng, 5, 3);
  EXPECT_EQ(g.table.size(), 32u);
  for (const auto& row : g.table)
    for (double v : row) {
      EXPECT_GE(v, -10.0);
      EXPECT_LE(v, 10.0);
    }
  const auto sym = testkit::make_symmetric(g, 1, 3);
  for (std::uint64_t b = 0; b < 32; ++b) {
    const std::uint64_t swapped = (b & ~std::uint64_t{0b1010}) | ((b >> 1) & 1) << 3 | ((b >> 3) & 1) << 1;
    EXPECT_EQ(sym.table[b], sym.table[swapped]);
  }
  const auto dummy = testkit::make_dummy(g, 4);
  for (std::uint64_t b = 0; b < 16; ++b) EXPECT_EQ(dummy.table[b], dummy.table[b | 16]);
  const auto layout = testkit::grid_layout(7, 64, 64);
  EXPECT_EQ(layout.size(), 7u);
  EXPECT_NO_THROW(layout.check_bounds(64, 64));
  for (unsigned i = 0; i < 7; ++i)
    for (unsigned j = i + 1; j < 7; ++j) {
      const Box& a = layout[i].box;
      const Box& b = layout[j].box;
      const bool overlap = a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
      EXPECT_FALSE(overlap);
    }
}

TEST(Testkit, SyntheticHairVsFoot) {
  const auto s = testkit::make_synthetic_dataset(1, 7, 2, 5);
  EXPECT_EQ(s.dataset.vocabulary[s.discriminative_part[0]], "hair");
  EXPECT_EQ(s.dataset.vocabulary[s.discriminative_part[1]], "foot");
  for (const auto& sample : s.dataset.samples) {
    const unsigned own = s.discriminative_part[sample.label];
    const unsigned other = s.discriminative_part[1 - sample.label];
    EXPECT_GE(sample.local_index(own), 0);
    EXPECT_LT(sample.local_index(other), 0);
  }
}

TEST(Testkit, EmptySyntheticDatasetIsValid) {
  test::TempDir dir("synth0");
  const auto s = testkit::make_synthetic_dataset(1, 3, 2, 0);
  EXPECT_TRUE(s.dataset.samples.empty());
  testkit::write_synthetic_dataset(s, dir.path());
  EXPECT_TRUE(load_manifest(dir / "manifest.jsonl").samples.empty());
}

TEST(Testkit, SameSeedSameBytes) {
  test::TempDir a("synthA"), b("synthB");
  testkit::write_synthetic_dataset(testkit::make_synthetic_dataset(77, 5, 3, 4), a.path());
  testkit::write_synthetic_dataset(testkit::make_synthetic_dataset(77, 5, 3, 4), b.path());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a.path());
    EXPECT_EQ(read_file_bytes(entry.path()), read_file_bytes(b.path() / rel)) << rel;
  }
}

TEST(Testkit, JitterStaysInBounds) {
  const auto s = testkit::make_synthetic_dataset(3, 6, 2, 10);
  const auto j = testkit::jitter_annotations(s.dataset, 2, 9);
  for (std::size_t i = 0; i < j.samples.size(); ++i) {
    const auto& sample = j.samples[i];
    EXPECT_NO_THROW(sample.parts.check_bounds(sample.image.width(), sample.image.height()));
    for (unsigned p = 0; p < sample.parts.size(); ++p) {
      const Box& a = s.dataset.samples[i].parts[p].box;
      const Box& b = sample.parts[p].box;
      EXPECT_LE(std::abs(a.x_min - b.x_min), 2);
      EXPECT_LE(std::abs(a.y_max - b.y_max), 2);
    }
  }
}

}  // namespace
}  // namespace pceve
