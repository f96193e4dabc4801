#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pceve/aggregation.hpp"
#include "pceve/error.hpp"
#include "test_util.hpp"

namespace pceve {
namespace {

SampleRecord rec(unsigned label, unsigned predicted, unsigned argmax, unsigned k = 3) {
  SampleRecord r;
  r.sample_id = "s";
  r.true_label = label;
  r.predicted_label = predicted;
  r.target_class = predicted;
  r.argmax_part = argmax;
  r.raw.assign(k, 0.0);
  r.raw[argmax] = 1.0;
  r.normalized = r.raw;
  r.normalization_applied = true;
  return r;
}

TEST(Aggregation, FrequenciesOfArgmaxParts) {
  const std::vector<SampleRecord> rs = {rec(0, 0, 0), rec(0, 0, 0), rec(0, 0, 1)};
  const auto h = class_histogram(rs, 0, 3);
  EXPECT_EQ(h.num_samples, 3u);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 1, 0}));
  EXPECT_NEAR(h.frequencies[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(h.frequencies[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(h.frequencies[2], 0.0);
}

TEST(Aggregation, CorrectOnlyFilter) {
  // eye = 1, hand = 2
  const std::vector<SampleRecord> rs = {rec(0, 0, 1), rec(0, 0, 1), rec(0, 1, 2)};
  const auto h = class_histogram(rs, 0, 3);
  EXPECT_EQ(h.num_samples, 2u);
  EXPECT_EQ(h.frequencies, (std::vector<double>{0, 1, 0}));
  const auto all = class_histogram(rs, 0, 3, RecordFilter::kAll);
  EXPECT_EQ(all.num_samples, 3u);
  EXPECT_NEAR(all.frequencies[2], 1.0 / 3.0, 1e-15);
}

TEST(Aggregation, EmptyClassIsAllowed) {
  const std::vector<SampleRecord> rs = {rec(0, 1, 0)};
  const auto h = class_histogram(rs, 0, 3);
  EXPECT_TRUE(h.empty());
  EXPECT_EQ(h.frequencies, (std::vector<double>{0, 0, 0}));
  const auto none = class_histogram({}, 1, 3);
  EXPECT_TRUE(none.empty());
}

TEST(Aggregation, TaskHistogramSumsClasses) {
  ClassHistogram a, b;
  a.frequencies = {0.6, 0.4};
  a.num_samples = 5;
  b.frequencies = {0.2, 0.8};
  b.num_samples = 5;
  b.class_index = 1;
  const std::vector<ClassHistogram> hs = {a, b};
  const auto t = task_histogram(hs);
  EXPECT_NEAR(t.values[0], 0.8, 1e-15);
  EXPECT_NEAR(t.values[1], 1.2, 1e-15);
  EXPECT_EQ(t.contributing_classes, 2u);
  ClassHistogram c;
  c.frequencies = {1.0};
  const std::vector<ClassHistogram> bad = {a, c};
  EXPECT_ERROR_CODE(task_histogram(bad), kPartCountMismatch);
}

TEST(Aggregation, CosineSimilarity) {
  const std::vector<double> a = {1, 0}, b = {0, 1}, c = {2, 0}, z = {0, 0};
  EXPECT_EQ(histogram_similarity(a, a), 1.0);
  EXPECT_EQ(histogram_similarity(a, c), 1.0);
  EXPECT_EQ(histogram_similarity(a, b), 0.0);
  EXPECT_ERROR_CODE(histogram_similarity(a, z), kZeroVector);
  const std::vector<double> three = {1, 2, 3};
  EXPECT_ERROR_CODE(histogram_similarity(a, three), kPartCountMismatch);
}

// Mass, additivity and order invariance on random record sets.
TEST(Aggregation, IdentitiesOnRandomRecords) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned k = 1 + static_cast<unsigned>(rng() % 7);
    const unsigned classes = 2 + static_cast<unsigned>(rng() % 4);
    std::vector<SampleRecord> rs;
    const std::size_t n = rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      rs.push_back(rec(static_cast<unsigned>(rng() % classes), static_cast<unsigned>(rng() % classes),
                       static_cast<unsigned>(rng() % k), k));
    }
    const auto hs = class_histograms(rs, classes, k);
    const auto task = task_histogram(hs);
    for (const auto& h : hs) {
      double mass = 0;
      for (double f : h.frequencies) mass += f;
      EXPECT_NEAR(mass, h.empty() ? 0.0 : 1.0, 1e-12);
    }
    for (unsigned p = 0; p < k; ++p) {
      double sum = 0;
      for (const auto& h : hs) sum += h.frequencies[p];
      EXPECT_NEAR(task.values[p], sum, 1e-12);
    }
    std::shuffle(rs.begin(), rs.end(), rng);
    const auto shuffled = class_histograms(rs, classes, k);
    for (unsigned c = 0; c < classes; ++c) {
      EXPECT_EQ(shuffled[c].counts, hs[c].counts);
      EXPECT_EQ(shuffled[c].frequencies, hs[c].frequencies);
    }
  }
}

TEST(Aggregation, MeanContributionSkipsMissingParts) {
  auto a = rec(0, 0, 0, 2);
  a.raw = {2.0, std::nullopt};
  auto b = rec(0, 0, 0, 2);
  b.raw = {4.0, 1.0};
  const std::vector<SampleRecord> rs = {a, b};
  const auto h = class_histogram(rs, 0, 2);
  EXPECT_EQ(h.mean_contribution[0], 3.0);
  EXPECT_EQ(h.mean_contribution[1], 1.0);
}

}  // namespace
}  // namespace pceve
