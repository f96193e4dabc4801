#include <random>

#include <gtest/gtest.h>
#include <omp.h>

#include "pceve/error.hpp"
#include "pceve/shapley.hpp"
#include "pceve/testkit/games.hpp"
#include "pceve/testkit/oracle.hpp"
#include "test_util.hpp"

namespace pceve {
namespace {

using testkit::TableGame;

PartShapleyMatrix run(const TableGame& game, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const auto h = testkit::make_game_harness(rng, game);
  return explain_sample(h.model, h.image, h.parts);
}

void expect_matches_oracle(const TableGame& game, const PartShapleyMatrix& m, double tol) {
  for (unsigned c = 0; c < game.num_classes(); ++c) {
    const auto oracle = testkit::oracle_shapley_permutation(game.scalar(c), game.num_parts);
    for (unsigned k = 0; k < game.num_parts; ++k) EXPECT_NEAR(m.values[k][c], oracle[k], tol);
  }
}

TEST(Shapley, AdditiveTwoParts) {
  const auto game = testkit::additive_game({{2, -2}, {1, -1}}, {0, 0});
  const auto m = run(game);
  EXPECT_NEAR(m.values[0][0], 2, 1e-12);
  EXPECT_NEAR(m.values[0][1], -2, 1e-12);
  EXPECT_NEAR(m.values[1][0], 1, 1e-12);
  EXPECT_NEAR(m.values[1][1], -1, 1e-12);
}

TEST(Shapley, SinglePartGetsWholeGain) {
  TableGame game{1, {{0.25, 1.0}, {3.0, -2.0}}};
  const auto m = run(game);
  EXPECT_NEAR(m.values[0][0], 2.75, 1e-12);
  EXPECT_NEAR(m.values[0][1], -3.0, 1e-12);
}

TEST(Shapley, DummyPartIsZero) {
  std::mt19937_64 rng(2);
  const auto game = testkit::make_dummy(testkit::random_table_game(rng, 4, 3), 2);
  const auto m = run(game);
  for (unsigned c = 0; c < 3; ++c) EXPECT_NEAR(m.values[2][c], 0.0, 1e-9);
}

TEST(Shapley, RandomThreePartGamesMatchOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto game = testkit::random_table_game(rng, 3, 2);
    expect_matches_oracle(game, run(game, i), 1e-9);
  }
}

TEST(Shapley, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(4);
  for (unsigned k : {1u, 4u, 7u, 9u}) {
    const auto game = testkit::random_table_game(rng, k, 3);
    const auto h = testkit::make_game_harness(rng, game, 96);
    const auto fast = explain_sample(h.model, h.image, h.parts);
    const auto slow = explain_sample_reference(h.model, h.image, h.parts);
    for (unsigned p = 0; p < k; ++p)
      for (unsigned c = 0; c < 3; ++c) EXPECT_NEAR(fast.values[p][c], slow.values[p][c], 1e-12);
  }
}

TEST(Shapley, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(5);
  const auto game = testkit::random_table_game(rng, 8, 2);
  const auto h = testkit::make_game_harness(rng, game, 96);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = explain_sample(h.model, h.image, h.parts);
  omp_set_num_threads(4);
  const auto four = explain_sample(h.model, h.image, h.parts);
  omp_set_num_threads(saved);
  EXPECT_EQ(one.values, four.values);
}

TEST(Shapley, ExactlyTwoToTheKCalls) {
  std::mt19937_64 rng(6);
  for (unsigned k : {1u, 3u, 7u}) {
    const auto game = testkit::random_table_game(rng, k, 2);
    const auto h = testkit::make_game_harness(rng, game);
    const CountingValueFunction counting(h.model);
    const auto d = explain_sample_detailed(counting, h.image, h.parts);
    EXPECT_EQ(counting.calls(), std::size_t{1} << k);
    EXPECT_EQ(d.cache.logits.size(), std::size_t{1} << k);
    EXPECT_EQ(d.cache.full(), game.table.back());
    EXPECT_EQ(d.cache.empty(), game.table.front());
  }
}

TEST(Shapley, PermutationEstimatorEnumeratesAllOrderings) {
  std::mt19937_64 rng(7);
  const auto game = testkit::random_table_game(rng, 3, 2);
  const auto h = testkit::make_game_harness(rng, game);
  const auto exact = explain_sample(h.model, h.image, h.parts);
  const auto mc = estimate_shapley_mc(h.model, h.image, h.parts, 6, 99);
  for (unsigned k = 0; k < 3; ++k)
    for (unsigned c = 0; c < 2; ++c) EXPECT_NEAR(mc.values[k][c], exact.values[k][c], 1e-9);
}

TEST(Shapley, PermutationEstimatorExactOnAdditive) {
  const auto game = testkit::additive_game({{1, 0}, {2, 0}, {-3, 1}, {0.5, 0.5}, {4, -4}}, {1, 1});
  std::mt19937_64 rng(8);
  const auto h = testkit::make_game_harness(rng, game);
  const auto mc = estimate_shapley_mc(h.model, h.image, h.parts, 17, 3);
  EXPECT_NEAR(mc.values[2][0], -3, 1e-12);
  EXPECT_NEAR(mc.values[4][1], -4, 1e-12);
}

TEST(Shapley, PermutationEstimatorIsSeeded) {
  std::mt19937_64 rng(9);
  const auto game = testkit::random_table_game(rng, 6, 2);
  const auto h = testkit::make_game_harness(rng, game);
  const auto a = estimate_shapley_mc(h.model, h.image, h.parts, 50, 1234);
  const auto b = estimate_shapley_mc(h.model, h.image, h.parts, 50, 1234);
  EXPECT_EQ(a.values, b.values);
  // Every permutation sum is efficient, so the estimate is too.
  for (unsigned c = 0; c < 2; ++c) {
    double total = 0;
    for (unsigned k = 0; k < 6; ++k) total += a.values[k][c];
    EXPECT_NEAR(total, game.table.back()[c] - game.table.front()[c], 1e-9);
  }
  EXPECT_ERROR_CODE(estimate_shapley_mc(h.model, h.image, h.parts, 0, 1), kUsage);
}

TEST(Shapley, TargetSelectionExample) {
  PartShapleyMatrix m{{"p0", "p1"}, {"a", "b"}, {{2, -2}, {1, -1}}};
  const auto s = select_target(m, {3, -3}, TargetSelection::predicted());
  EXPECT_EQ(s.target_class, 0u);
  EXPECT_EQ(s.predicted_class, 0u);
  EXPECT_EQ(s.histogram, (std::vector<double>{2, 1}));
  EXPECT_EQ(s.normalized, (std::vector<double>{1, 0.5}));
  EXPECT_TRUE(s.normalization_applied);
  EXPECT_EQ(s.argmax_part, 0u);

  const auto other = select_target(m, {3, -3}, TargetSelection::of_class(1));
  EXPECT_EQ(other.target_class, 1u);
  EXPECT_EQ(other.predicted_class, 0u);
  EXPECT_EQ(other.histogram, (std::vector<double>{-2, -1}));
  EXPECT_FALSE(other.normalization_applied);
  EXPECT_EQ(other.normalized, other.histogram);
  EXPECT_EQ(other.argmax_part, 1u);
  EXPECT_ERROR_CODE(select_target(m, {3, -3}, TargetSelection::of_class(2)), kUsage);
}

TEST(Shapley, AllZeroContributions) {
  PartShapleyMatrix m{{"p0", "p1", "p2"}, {"a", "b"}, {{0, 0}, {0, 0}, {0, 0}}};
  const auto s = select_target(m, {1, 0}, TargetSelection::predicted());
  EXPECT_FALSE(s.normalization_applied);
  EXPECT_EQ(s.normalized, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(s.argmax_part, 0u);
}

TEST(Shapley, ArgmaxInvariantToPositiveScaling) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 50; ++i) {
    PartShapleyMatrix m{{}, {"a", "b"}, {}};
    for (unsigned k = 0; k < 5; ++k) {
      m.part_names.push_back("p" + std::to_string(k));
      m.values.push_back({testkit::random_uniform(rng, -5, 5), testkit::random_uniform(rng, -5, 5)});
    }
    PartShapleyMatrix scaled = m;
    for (auto& row : scaled.values)
      for (auto& v : row) v *= 3.5;
    const auto a = select_target(m, {1, 0}, TargetSelection::predicted());
    const auto b = select_target(scaled, {1, 0}, TargetSelection::predicted());
    EXPECT_EQ(a.argmax_part, b.argmax_part);
  }
}

TEST(Shapley, PairwiseSumIsBalancedTree) {
  PairwiseSum s;
  const std::vector<double> xs = {1e16, 1.0, -1e16, 1.0};
  for (double x : xs) s.add(x);
  EXPECT_EQ(s.result(), (1e16 + 1.0) + (-1e16 + 1.0));
  PairwiseSum empty;
  EXPECT_EQ(empty.result(), 0.0);
  PairwiseSum many;
  for (int i = 1; i <= 1000; ++i) many.add(i);
  EXPECT_EQ(many.result(), 500500.0);
}

TEST(Oracle, KnownGames) {
  // f(S) = 1 when both players are present.
  const auto both = [](std::uint64_t b) { return b == 3 ? 1.0 : 0.0; };
  const auto v = testkit::oracle_shapley_permutation(both, 2);
  EXPECT_EQ(v, (std::vector<double>{0.5, 0.5}));
  const auto exact = testkit::oracle_shapley_permutation_exact(
      [](std::uint64_t b) { return b == 7 ? 1.0 : 0.0; }, 3);
  EXPECT_EQ(exact[0], testkit::Rational(1, 3));
  EXPECT_ERROR_CODE(testkit::oracle_shapley_permutation(both, 11), kTooManyPlayers);
  EXPECT_EQ(testkit::exact_rational(0.375), testkit::Rational(3, 8));
}

}  // namespace
}  // namespace pceve
