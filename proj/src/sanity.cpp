#include "pceve/sanity.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#include "pceve/error.hpp"
#include "pceve/masking.hpp"

namespace pceve {

namespace {

enum class Probe { kInclusion, kExclusion };

std::uint64_t probe_bits(const Sample& s, unsigned part, Probe probe) {
  const int j = s.local_index(part);
  const std::uint64_t full = full_mask(s.parts.size());
  if (probe == Probe::kInclusion) return j < 0 ? 0 : std::uint64_t{1} << j;
  return j < 0 ? full : full & ~(std::uint64_t{1} << j);
}

AccuracyTable run_probe(const ValueFunction& vf, const Dataset& dataset, Probe probe) {
  const unsigned num_parts = dataset.num_parts();
  if (num_parts < 2) {
    throw Error(ErrorCode::kUsage,
                "inclusion/exclusion needs at least 2 parts in the vocabulary, got " +
                    std::to_string(num_parts));
  }
  if (dataset.samples.empty()) throw Error(ErrorCode::kEmptyDataset, "manifest has no samples");
  const auto n = static_cast<std::ptrdiff_t>(dataset.samples.size());
  // correct[i][k]: sample i classified correctly under the probe for part k.
  std::vector<std::vector<char>> correct(dataset.samples.size());
  std::vector<std::exception_ptr> errors(dataset.samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const Sample& s = dataset.samples[i];
      const CoalitionImageSet set(s.image, s.parts);
      std::vector<RasterImage> images;
      images.reserve(num_parts);
      for (unsigned k = 0; k < num_parts; ++k) {
        images.push_back(set.render(Coalition(probe_bits(s, k, probe), s.parts.size())));
      }
      const auto logits = vf.evaluate_batch(images);
      correct[i].resize(num_parts);
      for (unsigned k = 0; k < num_parts; ++k) {
        correct[i][k] = argmax_index(logits[k]) == s.label;
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AccuracyTable table;
  const unsigned num_classes = dataset.num_classes();
  std::vector<std::size_t> class_size(num_classes, 0);
  for (const auto& s : dataset.samples) ++class_size[s.label];
  table.per_class.assign(num_parts, std::vector<std::optional<double>>(num_classes));
  table.overall.assign(num_parts, 0.0);
  for (unsigned k = 0; k < num_parts; ++k) {
    std::vector<std::size_t> hits(num_classes, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
      if (correct[i][k]) {
        ++hits[dataset.samples[i].label];
        ++total;
      }
    }
    for (unsigned c = 0; c < num_classes; ++c) {
      if (class_size[c] > 0) {
        table.per_class[k][c] = static_cast<double>(hits[c]) / static_cast<double>(class_size[c]);
      }
    }
    table.overall[k] = static_cast<double>(total) / static_cast<double>(dataset.samples.size());
  }
  return table;
}

void require_same_layout(const Dataset& a, const Dataset& b) {
  if (a.classes != b.classes || a.vocabulary != b.vocabulary) {
    throw Error(ErrorCode::kVocabularyMismatch, "annotation sources disagree on classes or parts");
  }
  if (a.samples.size() != b.samples.size()) {
    throw Error(ErrorCode::kVocabularyMismatch, "annotation sources cover different samples");
  }
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].id != b.samples[i].id || a.samples[i].label != b.samples[i].label) {
      throw Error(ErrorCode::kVocabularyMismatch,
                  "sample " + std::to_string(i) + " differs between annotation sources");
    }
  }
}

}  // namespace

AccuracyTable run_inclusion(const ValueFunction& vf, const Dataset& dataset) {
  return run_probe(vf, dataset, Probe::kInclusion);
}

AccuracyTable run_exclusion(const ValueFunction& vf, const Dataset& dataset) {
  return run_probe(vf, dataset, Probe::kExclusion);
}

std::vector<std::optional<double>> full_image_accuracy(const ValueFunction& vf,
                                                       const Dataset& dataset) {
  if (dataset.samples.empty()) throw Error(ErrorCode::kEmptyDataset, "manifest has no samples");
  std::vector<RasterImage> images;
  images.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) images.push_back(s.image);
  const auto logits = vf.evaluate_batch(images);
  const unsigned num_classes = dataset.num_classes();
  std::vector<std::size_t> hits(num_classes, 0);
  std::vector<std::size_t> sizes(num_classes, 0);
  std::size_t total = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const unsigned label = dataset.samples[i].label;
    ++sizes[label];
    if (argmax_index(logits[i]) == label) {
      ++hits[label];
      ++total;
    }
  }
  std::vector<std::optional<double>> out(num_classes + 1);
  for (unsigned c = 0; c < num_classes; ++c) {
    if (sizes[c] > 0) out[c] = static_cast<double>(hits[c]) / static_cast<double>(sizes[c]);
  }
  out[num_classes] = static_cast<double>(total) / static_cast<double>(images.size());
  return out;
}

std::vector<unsigned> contribution_order(const ClassHistogram& h) {
  std::vector<unsigned> order(h.frequencies.size());
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(), [&](unsigned a, unsigned b) {
    if (h.frequencies[a] != h.frequencies[b]) return h.frequencies[a] > h.frequencies[b];
    const auto& ma = h.mean_contribution[a];
    const auto& mb = h.mean_contribution[b];
    if (ma.has_value() != mb.has_value()) return ma.has_value();
    if (ma && *ma != *mb) return *ma > *mb;
    return a < b;
  });
  return order;
}

InclusionExclusionReport run_inclusion_exclusion(const ValueFunction& vf, const Dataset& dataset,
                                                 const SanityOptions& options) {
  InclusionExclusionReport report;
  report.classes = dataset.classes;
  report.vocabulary = dataset.vocabulary;
  if (options.inclusion) report.inclusion = run_inclusion(vf, dataset);
  if (options.exclusion) report.exclusion = run_exclusion(vf, dataset);

  const auto records = records_of(explain_dataset(vf, dataset, options.explain));
  report.class_histograms =
      class_histograms(records, dataset.num_classes(), dataset.num_parts(), options.filter);
  for (const auto& h : report.class_histograms) report.order.push_back(contribution_order(h));
  return report;
}

AnnotationComparison compare_annotation_sources(const ValueFunction& vf, const Dataset& a,
                                                const Dataset& b, const SanityOptions& options) {
  require_same_layout(a, b);
  AnnotationComparison out;
  out.classes = a.classes;
  const auto records_a = records_of(explain_dataset(vf, a, options.explain));
  const auto records_b = records_of(explain_dataset(vf, b, options.explain));
  out.histograms_a = class_histograms(records_a, a.num_classes(), a.num_parts(), options.filter);
  out.histograms_b = class_histograms(records_b, b.num_classes(), b.num_parts(), options.filter);

  double sum = 0.0;
  unsigned count = 0;
  out.similarity.resize(a.num_classes());
  for (unsigned c = 0; c < a.num_classes(); ++c) {
    if (out.histograms_a[c].empty() || out.histograms_b[c].empty()) continue;
    const double s =
        histogram_similarity(out.histograms_a[c].frequencies, out.histograms_b[c].frequencies);
    out.similarity[c] = s;
    sum += s;
    ++count;
  }
  if (count > 0) out.average = sum / count;
  return out;
}

}  // namespace pceve
