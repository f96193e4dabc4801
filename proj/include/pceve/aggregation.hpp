#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pceve {

// One explained sample, indexed over the full part vocabulary. Parts the
// sample does not annotate are std::nullopt.
struct SampleRecord {
  std::string sample_id;
  unsigned true_label = 0;
  unsigned predicted_label = 0;
  unsigned target_class = 0;
  unsigned argmax_part = 0;
  std::vector<std::optional<double>> raw;
  std::vector<std::optional<double>> normalized;
  bool normalization_applied = false;
};

enum class RecordFilter { kCorrectOnly, kAll };

struct ClassHistogram {
  unsigned class_index = 0;
  std::uint64_t num_samples = 0;  // N_c
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;  // counts / N_c, zero when N_c == 0
  // Mean raw contribution per part over the counted samples that annotate
  // it. Auxiliary summary, not part of the argmax-frequency histogram.
  std::vector<std::optional<double>> mean_contribution;

  bool empty() const noexcept { return num_samples == 0; }
};

struct TaskHistogram {
  std::vector<double> values;
  unsigned contributing_classes = 0;
};

// Counts argmax parts over samples whose true label is c (and, for
// kCorrectOnly, whose prediction is c too). An empty class yields an empty
// histogram rather than an error.
ClassHistogram class_histogram(std::span<const SampleRecord> records, unsigned class_index,
                               unsigned num_parts, RecordFilter filter = RecordFilter::kCorrectOnly);

std::vector<ClassHistogram> class_histograms(std::span<const SampleRecord> records,
                                             unsigned num_classes, unsigned num_parts,
                                             RecordFilter filter = RecordFilter::kCorrectOnly);

// Elementwise sum of class frequencies. PartCountMismatch if lengths differ.
TaskHistogram task_histogram(std::span<const ClassHistogram> histograms);

// Cosine similarity; ZeroVector if either side is all zeros.
double histogram_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace pceve
