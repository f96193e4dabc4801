#include "pceve/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace pceve {

ValueFunction::ValueFunction(std::vector<std::string> class_names)
    : class_names_(std::move(class_names)) {
  if (class_names_.size() < 2) {
    throw Error(ErrorCode::kClassCountMismatch, "a value function needs at least 2 classes");
  }
}

void ValueFunction::check_logits(const LogitVector& logits) const {
  if (logits.size() != num_classes()) {
    throw Error(ErrorCode::kMalformedResponse,
                "expected " + std::to_string(num_classes()) + " logits, got " +
                    std::to_string(logits.size()));
  }
  for (double v : logits) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteLogit, "evaluator returned NaN/Inf");
  }
}

LogitVector ValueFunction::evaluate(const RasterImage& img) const {
  LogitVector out = do_evaluate(img);
  check_logits(out);
  return out;
}

std::vector<LogitVector> ValueFunction::evaluate_batch(std::span<const RasterImage> imgs) const {
  if (imgs.empty()) throw Error(ErrorCode::kUsage, "evaluate_batch needs a nonempty batch");
  std::vector<LogitVector> out = do_evaluate_batch(imgs);
  if (out.size() != imgs.size()) {
    throw Error(ErrorCode::kMalformedResponse, "batch returned wrong number of results");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    try {
      check_logits(out[i]);
    } catch (const Error& e) {
      throw BatchItemError(e.code(), i, e.what());
    }
  }
  return out;
}

std::vector<LogitVector> ValueFunction::do_evaluate_batch(std::span<const RasterImage> imgs) const {
  const auto n = static_cast<std::ptrdiff_t>(imgs.size());
  std::vector<LogitVector> out(imgs.size());
  std::vector<std::exception_ptr> errors(imgs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = do_evaluate(imgs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw BatchItemError(e.code(), i, e.what());
    }
  }
  return out;
}

unsigned argmax_index(std::span<const double> values) {
  unsigned best = 0;
  for (unsigned i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

PartPresenceDecoder::PartPresenceDecoder(PartSet boxes, double threshold)
    : boxes_(std::move(boxes)), threshold_(threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kUsage, "presence threshold must lie in (0, 1]");
  }
}

double PartPresenceDecoder::presence_score(const RasterImage& img, unsigned part) const {
  const Box& box = boxes_[part].box;
  if (!box.valid_for(img.width(), img.height())) {
    throw Error(ErrorCode::kBoxOutOfBounds, "detector box for part '" + boxes_[part].name +
                                                "' does not fit the image");
  }
  const int channels = img.channels();
  std::vector<std::uint32_t> packed;
  packed.reserve(static_cast<std::size_t>(box.area()));
  for (int y = box.y_min; y < box.y_max; ++y) {
    for (int x = box.x_min; x < box.x_max; ++x) {
      std::uint32_t v = 0;
      for (int c = 0; c < channels; ++c) v = (v << 8) | img.at(x, y, c);
      packed.push_back(v);
    }
  }
  std::sort(packed.begin(), packed.end());
  std::size_t dominant = 0;
  for (std::size_t i = 0; i < packed.size();) {
    std::size_t j = i;
    while (j < packed.size() && packed[j] == packed[i]) ++j;
    dominant = std::max(dominant, j - i);
    i = j;
  }
  return 1.0 - static_cast<double>(dominant) / static_cast<double>(packed.size());
}

Coalition PartPresenceDecoder::decode(const RasterImage& img) const {
  std::uint64_t bits = 0;
  for (unsigned k = 0; k < boxes_.size(); ++k) {
    if (presence_score(img, k) >= threshold_) bits |= std::uint64_t{1} << k;
  }
  return {bits, boxes_.size()};
}

AdditiveToyModel::AdditiveToyModel(std::vector<std::string> class_names, PartSet boxes,
                                   std::vector<std::vector<double>> weights,
                                   std::vector<double> bias, double threshold)
    : ValueFunction(std::move(class_names)),
      decoder_(std::move(boxes), threshold),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (weights_.size() != decoder_.num_parts()) {
    throw Error(ErrorCode::kPartCountMismatch, "one weight row per part required");
  }
  for (const auto& row : weights_) {
    if (row.size() != num_classes()) {
      throw Error(ErrorCode::kClassCountMismatch, "weight row length must equal class count");
    }
  }
  if (bias_.size() != num_classes()) {
    throw Error(ErrorCode::kClassCountMismatch, "bias length must equal class count");
  }
}

LogitVector AdditiveToyModel::logits_for(const Coalition& present) const {
  LogitVector out = bias_;
  for (unsigned k = 0; k < weights_.size(); ++k) {
    if (!present.contains(k)) continue;
    for (unsigned c = 0; c < out.size(); ++c) out[c] += weights_[k][c];
  }
  return out;
}

LogitVector AdditiveToyModel::do_evaluate(const RasterImage& img) const {
  return logits_for(decoder_.decode(img));
}

TableToyModel::TableToyModel(std::vector<std::string> class_names, PartSet boxes,
                             std::vector<LogitVector> table, double threshold)
    : ValueFunction(std::move(class_names)),
      decoder_(std::move(boxes), threshold),
      table_(std::move(table)) {
  if (decoder_.num_parts() > kMaxExactParts) {
    throw Error(ErrorCode::kPartCountOutOfRange, "table model supports at most 24 parts");
  }
  if (table_.size() != (std::size_t{1} << decoder_.num_parts())) {
    throw Error(ErrorCode::kPartCountMismatch, "table must cover all 2^K coalitions");
  }
  for (const auto& row : table_) check_logits(row);
}

LogitVector TableToyModel::do_evaluate(const RasterImage& img) const {
  return table_[decoder_.decode(img).bits()];
}

CountingValueFunction::CountingValueFunction(const ValueFunction& inner)
    : ValueFunction(inner.class_names()), inner_(inner) {}

LogitVector CountingValueFunction::do_evaluate(const RasterImage& img) const {
  calls_.fetch_add(1);
  return inner_.evaluate(img);
}

std::vector<LogitVector> CountingValueFunction::do_evaluate_batch(
    std::span<const RasterImage> imgs) const {
  calls_.fetch_add(imgs.size());
  return inner_.evaluate_batch(imgs);
}

}  // namespace pceve
