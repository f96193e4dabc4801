#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pceve/aggregation.hpp"
#include "pceve/dataset.hpp"
#include "pceve/pipeline.hpp"
#include "pceve/value_function.hpp"

namespace pceve {

// Accuracy indexed [part][class] over the vocabulary. A class without samples
// has no accuracy (nullopt).
struct AccuracyTable {
  std::vector<std::vector<std::optional<double>>> per_class;
  std::vector<double> overall;  // per part, over all samples
};

// Every sample rendered with only vocabulary part k (plus the unannotated
// background). A sample lacking part k is rendered with no parts at all.
AccuracyTable run_inclusion(const ValueFunction& vf, const Dataset& dataset);
// Every sample rendered with all of its parts except k.
AccuracyTable run_exclusion(const ValueFunction& vf, const Dataset& dataset);

// Accuracy of the unmasked images, per class plus overall (last entry).
std::vector<std::optional<double>> full_image_accuracy(const ValueFunction& vf,
                                                       const Dataset& dataset);

struct InclusionExclusionReport {
  std::vector<std::string> classes;
  std::vector<std::string> vocabulary;
  std::optional<AccuracyTable> inclusion;
  std::optional<AccuracyTable> exclusion;
  std::vector<ClassHistogram> class_histograms;
  // Per class: part indices by descending class-level contribution.
  std::vector<std::vector<unsigned>> order;
};

struct SanityOptions {
  bool inclusion = true;
  bool exclusion = true;
  RecordFilter filter = RecordFilter::kCorrectOnly;
  ExplainOptions explain;
};

InclusionExclusionReport run_inclusion_exclusion(const ValueFunction& vf, const Dataset& dataset,
                                                 const SanityOptions& options);

// Sorts parts by I_c descending, then mean raw contribution, then index.
std::vector<unsigned> contribution_order(const ClassHistogram& histogram);

struct AnnotationComparison {
  std::vector<std::string> classes;
  std::vector<ClassHistogram> histograms_a;
  std::vector<ClassHistogram> histograms_b;
  std::vector<std::optional<double>> similarity;  // nullopt if a side is empty
  std::optional<double> average;                  // over classes with a value
};

// Both datasets must list the same classes, vocabulary and sample ids in the
// same order (VocabularyMismatch otherwise); only the boxes may differ.
AnnotationComparison compare_annotation_sources(const ValueFunction& vf, const Dataset& a,
                                                const Dataset& b, const SanityOptions& options);

}  // namespace pceve
