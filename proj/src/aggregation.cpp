#include "pceve/aggregation.hpp"

#include <cmath>

#include "pceve/error.hpp"

namespace pceve {

ClassHistogram class_histogram(std::span<const SampleRecord> records, unsigned class_index,
                               unsigned num_parts, RecordFilter filter) {
  ClassHistogram h;
  h.class_index = class_index;
  h.counts.assign(num_parts, 0);
  h.frequencies.assign(num_parts, 0.0);
  std::vector<double> sums(num_parts, 0.0);
  std::vector<std::uint64_t> present(num_parts, 0);

  for (const auto& r : records) {
    if (r.raw.size() != num_parts) {
      throw Error(ErrorCode::kPartCountMismatch,
                  "record '" + r.sample_id + "' has " + std::to_string(r.raw.size()) +
                      " parts, expected " + std::to_string(num_parts));
    }
    if (r.argmax_part >= num_parts) {
      throw Error(ErrorCode::kPartCountMismatch, "record '" + r.sample_id + "' argmax out of range");
    }
    if (r.true_label != class_index) continue;
    if (filter == RecordFilter::kCorrectOnly && r.predicted_label != class_index) continue;
    ++h.num_samples;
    ++h.counts[r.argmax_part];
    for (unsigned k = 0; k < num_parts; ++k) {
      if (r.raw[k]) {
        sums[k] += *r.raw[k];
        ++present[k];
      }
    }
  }

  h.mean_contribution.resize(num_parts);
  for (unsigned k = 0; k < num_parts; ++k) {
    if (h.num_samples > 0) {
      h.frequencies[k] = static_cast<double>(h.counts[k]) / static_cast<double>(h.num_samples);
    }
    if (present[k] > 0) h.mean_contribution[k] = sums[k] / static_cast<double>(present[k]);
  }
  return h;
}

std::vector<ClassHistogram> class_histograms(std::span<const SampleRecord> records,
                                             unsigned num_classes, unsigned num_parts,
                                             RecordFilter filter) {
  std::vector<ClassHistogram> out(num_classes);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < static_cast<int>(num_classes); ++c) {
    out[c] = class_histogram(records, static_cast<unsigned>(c), num_parts, filter);
  }
  return out;
}

TaskHistogram task_histogram(std::span<const ClassHistogram> histograms) {
  TaskHistogram t;
  if (histograms.empty()) return t;
  const std::size_t k = histograms.front().frequencies.size();
  t.values.assign(k, 0.0);
  for (const auto& h : histograms) {
    if (h.frequencies.size() != k) {
      throw Error(ErrorCode::kPartCountMismatch, "class histograms disagree on part count");
    }
    for (std::size_t i = 0; i < k; ++i) t.values[i] += h.frequencies[i];
    if (!h.empty()) ++t.contributing_classes;
  }
  return t;
}

double histogram_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kPartCountMismatch, "histograms differ in length");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero histogram");
  const double cos = dot / std::sqrt(na * nb);
  return std::fmax(-1.0, std::fmin(1.0, cos));
}

}  // namespace pceve
