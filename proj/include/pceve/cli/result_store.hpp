#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pceve/aggregation.hpp"
#include "pceve/dataset.hpp"
#include "pceve/pipeline.hpp"
#include "pceve/sanity.hpp"

namespace pceve::cli {

// A run directory. Every file is written through here, from one thread.
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  void write_json(const std::filesystem::path& relative, const nlohmann::json& j) const;
  void write_text(const std::filesystem::path& relative, const std::string& text) const;

 private:
  std::filesystem::path root_;
};

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
nlohmann::json optional_array(const std::vector<std::optional<double>>& values);
// File-name-safe form of a sample id.
std::string safe_file_stem(const std::string& id);

nlohmann::json sample_json(const Dataset& dataset, const SampleResult& result);
nlohmann::json class_histograms_json(const Dataset& dataset,
                                     std::span<const ClassHistogram> histograms,
                                     RecordFilter filter);
nlohmann::json task_histogram_json(const Dataset& dataset, const TaskHistogram& task);
nlohmann::json sanity_json(const InclusionExclusionReport& report,
                           const std::vector<std::optional<double>>& full_accuracy);
std::string sanity_csv(const InclusionExclusionReport& report);
nlohmann::json annotation_json(const Dataset& dataset, const AnnotationComparison& comparison);
std::string annotation_csv(const AnnotationComparison& comparison);

}  // namespace pceve::cli
