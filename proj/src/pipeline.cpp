#include "pceve/pipeline.hpp"

#include <exception>

#include "pceve/error.hpp"

namespace pceve {

SampleResult explain_dataset_sample(const ValueFunction& vf, const Dataset& dataset,
                                    const Sample& sample, const ExplainOptions& options) {
  if (vf.num_classes() != dataset.num_classes()) {
    throw Error(ErrorCode::kClassCountMismatch,
                "model has " + std::to_string(vf.num_classes()) + " classes, manifest has " +
                    std::to_string(dataset.num_classes()));
  }
  SampleResult result;
  if (options.mc_permutations > 0) {
    result.matrix = estimate_shapley_mc(vf, sample.image, sample.parts, options.mc_permutations,
                                        options.seed);
    result.full_logits = vf.evaluate(sample.image);
  } else {
    SampleExplanation explanation = explain_sample_detailed(vf, sample.image, sample.parts);
    result.matrix = std::move(explanation.matrix);
    result.full_logits = explanation.cache.full();
    if (options.keep_cache) result.cache = std::move(explanation.cache);
  }

  const TargetSelection selection = options.target_class
                                        ? TargetSelection::of_class(*options.target_class)
                                        : TargetSelection::predicted();
  result.contribution = select_target(result.matrix, result.full_logits, selection);

  SampleRecord& r = result.record;
  r.sample_id = sample.id;
  r.true_label = sample.label;
  r.predicted_label = result.contribution.predicted_class;
  r.target_class = result.contribution.target_class;
  r.argmax_part = sample.vocab_index[result.contribution.argmax_part];
  r.normalization_applied = result.contribution.normalization_applied;
  r.raw.assign(dataset.num_parts(), std::nullopt);
  r.normalized.assign(dataset.num_parts(), std::nullopt);
  for (std::size_t j = 0; j < sample.vocab_index.size(); ++j) {
    r.raw[sample.vocab_index[j]] = result.contribution.histogram[j];
    r.normalized[sample.vocab_index[j]] = result.contribution.normalized[j];
  }
  return result;
}

std::vector<SampleResult> explain_dataset(const ValueFunction& vf, const Dataset& dataset,
                                          const ExplainOptions& options) {
  if (dataset.samples.empty()) throw Error(ErrorCode::kEmptyDataset, "manifest has no samples");
  const auto n = static_cast<std::ptrdiff_t>(dataset.samples.size());
  std::vector<SampleResult> results(dataset.samples.size());
  std::vector<std::exception_ptr> errors(dataset.samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      results[i] = explain_dataset_sample(vf, dataset, dataset.samples[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "sample '" + dataset.samples[i].id + "': " + e.what());
    }
  }
  return results;
}

std::vector<SampleRecord> records_of(const std::vector<SampleResult>& results) {
  std::vector<SampleRecord> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.record);
  return out;
}

}  // namespace pceve
