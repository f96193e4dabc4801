#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pceve/coalition.hpp"
#include "pceve/error.hpp"
#include "pceve/image.hpp"
#include "pceve/masking.hpp"

namespace pceve {

using LogitVector = std::vector<double>;

// Raised by evaluate_batch for the first failing item.
class BatchItemError : public Error {
 public:
  BatchItemError(ErrorCode code, std::size_t index, const std::string& message)
      : Error(code, "batch item " + std::to_string(index) + ": " + message), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// A classifier seen as a black box: image in, one finite logit per class out.
// Implementations must be deterministic in the image bytes.
class ValueFunction {
 public:
  virtual ~ValueFunction() = default;

  unsigned num_classes() const noexcept { return static_cast<unsigned>(class_names_.size()); }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  // Checks length and finiteness of the implementation's output.
  LogitVector evaluate(const RasterImage& img) const;
  // Order preserving. In-process models fan out across OpenMP threads.
  std::vector<LogitVector> evaluate_batch(std::span<const RasterImage> imgs) const;

 protected:
  explicit ValueFunction(std::vector<std::string> class_names);

  virtual LogitVector do_evaluate(const RasterImage& img) const = 0;
  virtual std::vector<LogitVector> do_evaluate_batch(std::span<const RasterImage> imgs) const;

  void check_logits(const LogitVector& logits) const;

 private:
  std::vector<std::string> class_names_;
};

// Decodes which parts an image shows by looking at fixed detector boxes. A box
// counts as present when at least `threshold` of its pixels differ from the
// box's dominant pixel value; a masked box is one flat colour, so it reads as
// absent.
class PartPresenceDecoder {
 public:
  PartPresenceDecoder(PartSet boxes, double threshold);

  const PartSet& boxes() const noexcept { return boxes_; }
  double threshold() const noexcept { return threshold_; }
  unsigned num_parts() const noexcept { return boxes_.size(); }

  double presence_score(const RasterImage& img, unsigned part) const;
  Coalition decode(const RasterImage& img) const;

 private:
  PartSet boxes_;
  double threshold_;
};

inline constexpr double kDefaultPresenceThreshold = 0.9;

// logit[c] = bias[c] + sum over decoded-present parts k of weights[k][c].
class AdditiveToyModel final : public ValueFunction {
 public:
  AdditiveToyModel(std::vector<std::string> class_names, PartSet boxes,
                   std::vector<std::vector<double>> weights, std::vector<double> bias,
                   double threshold = kDefaultPresenceThreshold);

  const PartPresenceDecoder& decoder() const noexcept { return decoder_; }
  const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }

  LogitVector logits_for(const Coalition& present) const;

 protected:
  LogitVector do_evaluate(const RasterImage& img) const override;

 private:
  PartPresenceDecoder decoder_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

// Arbitrary game: the decoded coalition indexes a table of 2^K logit vectors.
class TableToyModel final : public ValueFunction {
 public:
  TableToyModel(std::vector<std::string> class_names, PartSet boxes,
                std::vector<LogitVector> table, double threshold = kDefaultPresenceThreshold);

  const PartPresenceDecoder& decoder() const noexcept { return decoder_; }
  const std::vector<LogitVector>& table() const noexcept { return table_; }

 protected:
  LogitVector do_evaluate(const RasterImage& img) const override;

 private:
  PartPresenceDecoder decoder_;
  std::vector<LogitVector> table_;
};

// Wraps another value function and counts every image it is asked to score.
class CountingValueFunction final : public ValueFunction {
 public:
  explicit CountingValueFunction(const ValueFunction& inner);

  std::size_t calls() const noexcept { return calls_.load(); }
  void reset() noexcept { calls_.store(0); }

 protected:
  LogitVector do_evaluate(const RasterImage& img) const override;
  std::vector<LogitVector> do_evaluate_batch(std::span<const RasterImage> imgs) const override;

 private:
  const ValueFunction& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

// Argmax with the smallest index winning ties.
unsigned argmax_index(std::span<const double> values);

}  // namespace pceve
