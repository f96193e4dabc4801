#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pceve/error.hpp"
#include "pceve/masking.hpp"
#include "pceve/model_config.hpp"
#include "pceve/testkit/games.hpp"
#include "pceve/value_function.hpp"
#include "test_util.hpp"

namespace pceve {
namespace {

struct Fixture {
  RasterImage image;
  PartSet parts;
};

Fixture noise_with_grid(unsigned k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {testkit::noise_image(rng, 64, 64, 3), testkit::grid_layout(k, 64, 64)};
}

TEST(ValueFunction, AdditiveFullAndEmpty) {
  const auto f = noise_with_grid(2, 1);
  const AdditiveToyModel model({"a", "b"}, f.parts, {{2.0, -2.0}, {1.0, -1.0}}, {0.0, 0.0});
  const auto set = generate_set(f.image, f.parts);
  EXPECT_EQ(model.evaluate(set.render(Coalition::full(2))), (LogitVector{3.0, -3.0}));
  EXPECT_EQ(model.evaluate(set.render(Coalition::empty(2))), (LogitVector{0.0, 0.0}));
  EXPECT_EQ(model.evaluate(set.render(Coalition::from_string("10"))), (LogitVector{2.0, -2.0}));
}

TEST(ValueFunction, DecoderReadsEveryCoalition) {
  for (unsigned k : {1u, 3u, 6u}) {
    const auto f = noise_with_grid(k, k);
    const auto set = generate_set(f.image, f.parts);
    const PartPresenceDecoder decoder(f.parts, kDefaultPresenceThreshold);
    for (std::uint64_t b = 0; b < set.size(); ++b) {
      EXPECT_EQ(decoder.decode(set.render(Coalition(b, k))).bits(), b);
    }
  }
}

TEST(ValueFunction, TableLookup) {
  const auto f = noise_with_grid(2, 2);
  std::vector<LogitVector> table = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  const TableToyModel model({"x", "y"}, f.parts, table);
  const auto set = generate_set(f.image, f.parts);
  for (std::uint64_t b = 0; b < 4; ++b) EXPECT_EQ(model.evaluate(set.render(Coalition(b, 2))), table[b]);
  EXPECT_THROW(TableToyModel({"x", "y"}, f.parts, {{0, 1}}), Error);
}

TEST(ValueFunction, BatchPreservesOrder) {
  const auto f = noise_with_grid(3, 3);
  const AdditiveToyModel model({"a", "b"}, f.parts, {{1, 0}, {2, 0}, {4, 0}}, {0, 0});
  const auto set = generate_set(f.image, f.parts);
  std::vector<std::uint64_t> order = {5, 0, 7, 3, 1, 6, 2, 4};
  std::vector<RasterImage> imgs;
  for (auto b : order) imgs.push_back(set.render(Coalition(b, 3)));
  const auto out = model.evaluate_batch(imgs);
  ASSERT_EQ(out.size(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(out[i][0], static_cast<double>(order[i]));
  EXPECT_THROW(model.evaluate_batch({}), Error);
}

TEST(ValueFunction, CountingWrapper) {
  const auto f = noise_with_grid(2, 4);
  const AdditiveToyModel model({"a", "b"}, f.parts, {{1, 0}, {1, 0}}, {0, 0});
  CountingValueFunction counting(model);
  std::vector<RasterImage> imgs(5, f.image);
  counting.evaluate_batch(imgs);
  counting.evaluate(f.image);
  EXPECT_EQ(counting.calls(), 6u);
  counting.reset();
  EXPECT_EQ(counting.calls(), 0u);
  EXPECT_EQ(counting.class_names(), model.class_names());
}

TEST(ValueFunction, ArgmaxTieBreaksLow) {
  const std::vector<double> v = {1.0, 3.0, 3.0, -1.0};
  EXPECT_EQ(argmax_index(v), 1u);
  const std::vector<double> single = {-5.0};
  EXPECT_EQ(argmax_index(single), 0u);
}

TEST(ValueFunction, AdditiveConfigRoundTrip) {
  const auto f = noise_with_grid(2, 5);
  const AdditiveToyModel model({"a", "b"}, f.parts, {{0.5, -0.25}, {1.5, 2.0}}, {0.1, -0.1});
  const auto copy = additive_model_from_json(to_json(model));
  EXPECT_EQ(copy->weights(), model.weights());
  EXPECT_EQ(copy->bias(), model.bias());
  EXPECT_EQ(copy->decoder().boxes(), model.decoder().boxes());
  EXPECT_EQ(copy->evaluate(f.image), model.evaluate(f.image));
}

TEST(ValueFunction, TableConfigRoundTrip) {
  const auto f = noise_with_grid(2, 6);
  const TableToyModel model({"a", "b"}, f.parts, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
  const auto copy = table_model_from_json(to_json(model));
  EXPECT_EQ(copy->table(), model.table());
  auto j = to_json(model);
  j["table"].erase("11");
  EXPECT_THROW(table_model_from_json(j), Error);
}

class BrokenModel final : public ValueFunction {
 public:
  explicit BrokenModel(LogitVector out) : ValueFunction({"a", "b"}), out_(std::move(out)) {}

 protected:
  LogitVector do_evaluate(const RasterImage&) const override { return out_; }

 private:
  LogitVector out_;
};

TEST(ValueFunction, OutputIsChecked) {
  const RasterImage img(2, 2, 1);
  EXPECT_ERROR_CODE(BrokenModel({1.0, std::nan("")}).evaluate(img), kNonFiniteLogit);
  EXPECT_ERROR_CODE(BrokenModel({1.0, HUGE_VAL}).evaluate(img), kNonFiniteLogit);
  EXPECT_ERROR_CODE(BrokenModel({1.0}).evaluate(img), kMalformedResponse);
  const std::vector<RasterImage> batch(3, img);
  try {
    BrokenModel({std::nan(""), 0.0}).evaluate_batch(batch);
    FAIL();
  } catch (const BatchItemError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLogit);
  }
}

TEST(ValueFunction, RequiresTwoClasses) {
  const auto f = noise_with_grid(1, 7);
  EXPECT_THROW(AdditiveToyModel({"only"}, f.parts, {{1.0}}, {0.0}), Error);
}

}  // namespace
}  // namespace pceve
