#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pceve/coalition.hpp"
#include "pceve/masking.hpp"
#include "pceve/value_function.hpp"

namespace pceve {

// Per-part Shapley values of every class logit: values[k][c].
struct PartShapleyMatrix {
  std::vector<std::string> part_names;
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> values;

  unsigned num_parts() const noexcept { return static_cast<unsigned>(values.size()); }
  unsigned num_classes() const noexcept {
    return values.empty() ? 0U : static_cast<unsigned>(values.front().size());
  }
  std::vector<double> column(unsigned c) const;
};

// Logits of all 2^K coalition images, indexed by coalition bits.
struct CoalitionLogits {
  unsigned num_parts = 0;
  std::vector<LogitVector> logits;

  const LogitVector& operator[](std::uint64_t bits) const { return logits[bits]; }
  const LogitVector& full() const { return logits.back(); }
  const LogitVector& empty() const { return logits.front(); }
};

struct SampleExplanation {
  PartShapleyMatrix matrix;
  CoalitionLogits cache;
};

// Renders and scores every coalition image once (2^K value-function calls).
// Rendering and in-process evaluation run across OpenMP threads in chunks.
CoalitionLogits evaluate_coalitions(const ValueFunction& vf, const CoalitionImageSet& set);

// Shapley accumulation over cached logits. Parts are processed in parallel;
// each (part, class) sum runs in a fixed pairwise order, so the result does not
// depend on the thread count.
PartShapleyMatrix shapley_from_logits(const CoalitionSpace& space, const CoalitionLogits& cache,
                                      std::vector<std::string> part_names,
                                      std::vector<std::string> class_names);

SampleExplanation explain_sample_detailed(const ValueFunction& vf, const RasterImage& img,
                                          const PartSet& parts);
PartShapleyMatrix explain_sample(const ValueFunction& vf, const RasterImage& img,
                                 const PartSet& parts);

// Serial reference: one image at a time, plain left-to-right sums straight
// from the subset formula. Kept for tests and benchmarks.
PartShapleyMatrix explain_sample_reference(const ValueFunction& vf, const RasterImage& img,
                                           const PartSet& parts);

// Permutation-sampling estimate. When num_permutations >= K! (and K <= 10) all
// orderings are enumerated instead, which reproduces the exact values.
PartShapleyMatrix estimate_shapley_mc(const ValueFunction& vf, const RasterImage& img,
                                      const PartSet& parts, std::uint64_t num_permutations,
                                      std::uint64_t seed);

struct TargetSelection {
  enum class Mode { kPredicted, kLabel };
  Mode mode = Mode::kPredicted;
  unsigned label = 0;

  static TargetSelection predicted() { return {}; }
  static TargetSelection of_class(unsigned c) { return {Mode::kLabel, c}; }
};

struct SampleContribution {
  std::vector<double> histogram;   // c_S for the target class
  std::vector<double> normalized;  // c_S / max(c_S), or a raw copy when max <= 0
  bool normalization_applied = false;
  unsigned target_class = 0;
  TargetSelection::Mode mode = TargetSelection::Mode::kPredicted;
  unsigned predicted_class = 0;
  unsigned argmax_part = 0;  // first index attaining the maximum
};

// full_logits are the scores of the unmasked image; they decide the predicted
// class.
SampleContribution select_target(const PartShapleyMatrix& matrix, const LogitVector& full_logits,
                                 TargetSelection selection);

// Streaming pairwise (cascade) summation. For 2^n addends it yields exactly the
// balanced-tree sum.
class PairwiseSum {
 public:
  void add(double x);
  double result() const;

 private:
  struct Node {
    double value;
    unsigned level;
  };
  std::vector<Node> stack_;
};

}  // namespace pceve
