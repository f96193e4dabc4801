#include <random>

#include <gtest/gtest.h>

#include "pceve/error.hpp"
#include "pceve/pipeline.hpp"
#include "pceve/sanity.hpp"
#include "pceve/testkit/games.hpp"
#include "pceve/testkit/synthetic.hpp"
#include "test_util.hpp"

namespace pceve {
namespace {

class ConstantModel final : public ValueFunction {
 public:
  explicit ConstantModel(unsigned predicted) : ValueFunction({"c0", "c1"}), predicted_(predicted) {}

 protected:
  LogitVector do_evaluate(const RasterImage&) const override {
    LogitVector out(2, 0.0);
    out[predicted_] = 1.0;
    return out;
  }

 private:
  unsigned predicted_;
};

// Noise images carrying every vocabulary part on the grid, labels given.
Dataset grid_dataset(unsigned k, const std::vector<unsigned>& labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.classes = {"c0", "c1"};
  ds.vocabulary = testkit::default_part_names(k);
  const PartSet layout = testkit::grid_layout(k, 64, 64);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.label = labels[i];
    s.parts = layout;
    for (unsigned v = 0; v < k; ++v) s.vocab_index.push_back(v);
    s.image = testkit::noise_image(rng, 64, 64, 3);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

TEST(Pipeline, MissingPartBecomesNull) {
  auto ds = grid_dataset(3, {0}, 1);
  Sample& s = ds.samples[0];
  s.parts = PartSet({s.parts[0], s.parts[2]});
  s.vocab_index = {0, 2};
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(3, 64, 64), {{2, 0}, {5, 0}, {1, 0}}, {0, 0});
  const auto r = explain_dataset_sample(model, ds, s, {});
  ASSERT_EQ(r.record.raw.size(), 3u);
  EXPECT_NEAR(*r.record.raw[0], 2.0, 1e-12);
  EXPECT_FALSE(r.record.raw[1].has_value());
  EXPECT_FALSE(r.record.normalized[1].has_value());
  EXPECT_NEAR(*r.record.raw[2], 1.0, 1e-12);
  EXPECT_EQ(r.record.argmax_part, 0u);
  EXPECT_EQ(r.matrix.num_parts(), 2u);
}

TEST(Pipeline, ClassOverrideEqualToPredictedIsNoOp) {
  const auto ds = grid_dataset(3, {0, 1}, 2);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(3, 64, 64), {{2, 0}, {0, 1}, {1, 0}}, {0, 0});
  for (const auto& s : ds.samples) {
    const auto a = explain_dataset_sample(model, ds, s, {});
    ExplainOptions o;
    o.target_class = a.record.predicted_label;
    const auto b = explain_dataset_sample(model, ds, s, o);
    EXPECT_EQ(a.record.raw, b.record.raw);
    EXPECT_EQ(a.record.argmax_part, b.record.argmax_part);
    EXPECT_EQ(b.contribution.mode, TargetSelection::Mode::kLabel);
  }
}

TEST(Pipeline, EmptyDatasetAndClassMismatch) {
  Dataset ds = grid_dataset(2, {}, 3);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(2, 64, 64), {{1, 0}, {0, 1}}, {0, 0});
  EXPECT_ERROR_CODE(explain_dataset(model, ds, {}), kEmptyDataset);
  ds = grid_dataset(2, {0}, 3);
  const AdditiveToyModel three({"a", "b", "c"}, testkit::grid_layout(2, 64, 64), {{1, 0, 0}, {0, 1, 0}},
                               {0, 0, 0});
  EXPECT_ERROR_CODE(explain_dataset(three, ds, {}), kClassCountMismatch);
}

TEST(Pipeline, DatasetMassPerClass) {
  const auto synthetic = testkit::make_synthetic_dataset(3, 4, 2, 2);
  const auto model = synthetic.model();
  const auto results = explain_dataset(*model, synthetic.dataset, {});
  const auto hs = class_histograms(records_of(results), 2, 4);
  const auto task = task_histogram(hs);
  double total = 0;
  for (const auto& h : hs) {
    double mass = 0;
    for (double f : h.frequencies) mass += f;
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
  for (double v : task.values) total += v;
  EXPECT_NEAR(total, 2.0, 1e-12);
}

TEST(Sanity, DominantPartWinsInclusionAndLosesExclusion) {
  const auto ds = grid_dataset(3, {0, 0, 0, 1, 1, 1}, 4);
  // Part 0 carries the class-0 signal; class 1 wins on the bias when it is gone.
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(3, 64, 64),
                               {{3, 0}, {0.2, 0}, {0.1, 0}}, {0, 1});
  const auto inc = run_inclusion(model, ds);
  const auto exc = run_exclusion(model, ds);
  EXPECT_EQ(*inc.per_class[0][0], 1.0);
  EXPECT_EQ(*inc.per_class[1][0], 0.0);
  EXPECT_EQ(*exc.per_class[0][0], 0.0);
  EXPECT_EQ(*exc.per_class[1][0], 1.0);
  EXPECT_GT(*inc.per_class[0][0], *inc.per_class[1][0]);
  EXPECT_LT(*exc.per_class[0][0], *exc.per_class[1][0]);
}

TEST(Sanity, ConstantModelGivesBaseRate) {
  const auto ds = grid_dataset(3, {0, 1, 1, 1}, 5);
  const ConstantModel model(1);
  const auto inc = run_inclusion(model, ds);
  for (unsigned k = 0; k < 3; ++k) {
    EXPECT_EQ(inc.overall[k], 0.75);
    EXPECT_EQ(*inc.per_class[k][1], 1.0);
    EXPECT_EQ(*inc.per_class[k][0], 0.0);
  }
}

TEST(Sanity, SymmetricWeightsGiveEqualInclusion) {
  const auto ds = grid_dataset(2, {0, 1, 0, 1}, 6);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(2, 64, 64), {{1, 0}, {1, 0}}, {0, 0.5});
  const auto inc = run_inclusion(model, ds);
  EXPECT_EQ(inc.overall[0], inc.overall[1]);
  EXPECT_EQ(inc.per_class[0], inc.per_class[1]);
}

TEST(Sanity, DummyExclusionMatchesFullImage) {
  const auto ds = grid_dataset(3, {0, 1, 0, 1, 1}, 7);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(3, 64, 64), {{1, 0}, {0, 0.8}, {0, 0}},
                               {0, 0.1});
  const auto exc = run_exclusion(model, ds);
  const auto full = full_image_accuracy(model, ds);
  EXPECT_EQ(exc.overall[2], *full.back());
  EXPECT_EQ(exc.per_class[2][0], full[0]);
  EXPECT_EQ(exc.per_class[2][1], full[1]);
}

TEST(Sanity, SinglePartRejected) {
  const auto ds = grid_dataset(1, {0}, 8);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(1, 64, 64), {{1, 0}}, {0, 0});
  try {
    run_exclusion(model, ds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kUsage);
    EXPECT_NE(std::string(e.what()).find("at least 2 parts"), std::string::npos);
  }
}

TEST(Sanity, ReportIsSortedByContribution) {
  const auto ds = grid_dataset(3, {0, 0, 1, 1}, 9);
  const AdditiveToyModel model(ds.classes, testkit::grid_layout(3, 64, 64), {{0.5, 0}, {0, 2}, {3, 0}},
                               {0, 0});
  SanityOptions options;
  options.filter = RecordFilter::kAll;
  const auto report = run_inclusion_exclusion(model, ds, options);
  ASSERT_TRUE(report.inclusion && report.exclusion);
  EXPECT_EQ(report.order[0].front(), 2u);
  for (unsigned c = 0; c < 2; ++c) {
    const auto& freq = report.class_histograms[c].frequencies;
    for (std::size_t i = 1; i < report.order[c].size(); ++i) {
      EXPECT_GE(freq[report.order[c][i - 1]], freq[report.order[c][i]]);
    }
  }
}

TEST(Sanity, IdenticalAnnotationSourcesAgree) {
  const auto synthetic = testkit::make_synthetic_dataset(4, 5, 2, 6);
  const auto model = synthetic.model();
  const auto cmp = compare_annotation_sources(*model, synthetic.dataset, synthetic.dataset, {});
  ASSERT_TRUE(cmp.average.has_value());
  EXPECT_EQ(*cmp.average, 1.0);
  for (const auto& s : cmp.similarity) EXPECT_EQ(*s, 1.0);
  const auto zero = testkit::jitter_annotations(synthetic.dataset, 0, 1);
  EXPECT_EQ(*compare_annotation_sources(*model, synthetic.dataset, zero, {}).average, 1.0);
}

TEST(Sanity, MismatchedSourcesRejected) {
  const auto a = testkit::make_synthetic_dataset(4, 5, 2, 3);
  const auto b = testkit::make_synthetic_dataset(4, 5, 2, 4);
  const auto model = a.model();
  EXPECT_ERROR_CODE(compare_annotation_sources(*model, a.dataset, b.dataset, {}), kVocabularyMismatch);
}

}  // namespace
}  // namespace pceve
