#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pceve/aggregation.hpp"
#include "pceve/dataset.hpp"
#include "pceve/shapley.hpp"
#include "pceve/value_function.hpp"

namespace pceve {

struct ExplainOptions {
  std::optional<unsigned> target_class;  // default: predicted class
  std::uint64_t mc_permutations = 0;     // 0 = exact enumeration
  std::uint64_t seed = 0;
  bool keep_cache = false;  // retain the 2^K logit vectors (exact mode only)
};

struct SampleResult {
  SampleRecord record;
  PartShapleyMatrix matrix;
  SampleContribution contribution;
  LogitVector full_logits;
  std::optional<CoalitionLogits> cache;
};

// Explains one sample over the parts it annotates and scatters the result
// into the dataset vocabulary.
SampleResult explain_dataset_sample(const ValueFunction& vf, const Dataset& dataset,
                                    const Sample& sample, const ExplainOptions& options);

// All samples, in manifest order. Samples are distributed over OpenMP threads;
// results do not depend on the thread count. EmptyDataset if there are none.
std::vector<SampleResult> explain_dataset(const ValueFunction& vf, const Dataset& dataset,
                                          const ExplainOptions& options);

std::vector<SampleRecord> records_of(const std::vector<SampleResult>& results);

}  // namespace pceve
