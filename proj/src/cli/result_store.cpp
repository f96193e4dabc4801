#include "pceve/cli/result_store.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pceve/error.hpp"

namespace pceve::cli {

namespace {

nlohmann::json names_of(const std::vector<std::string>& all, const std::vector<unsigned>& idx) {
  nlohmann::json out = nlohmann::json::array();
  for (unsigned i : idx) out.push_back(all.at(i));
  return out;
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

nlohmann::json table_json(const std::optional<AccuracyTable>& table,
                          const std::vector<unsigned>& order, unsigned c) {
  if (!table) return nullptr;
  nlohmann::json out = nlohmann::json::array();
  for (unsigned k : order) {
    const auto& v = table->per_class[k][c];
    out.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  }
  return out;
}

}  // namespace

ResultStore::ResultStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + root_.string() + ": " + ec.message());
}

void ResultStore::write_json(const std::filesystem::path& relative, const nlohmann::json& j) const {
  write_text(relative, j.dump(2) + "\n");
}

void ResultStore::write_text(const std::filesystem::path& relative, const std::string& text) const {
  const auto path = root_ / relative;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

nlohmann::json optional_array(const std::vector<std::optional<double>>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : values) out.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return out;
}

std::string safe_file_stem(const std::string& id) {
  std::string out;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

nlohmann::json sample_json(const Dataset& dataset, const SampleResult& result) {
  const SampleRecord& r = result.record;
  nlohmann::json j;
  j["sample_id"] = r.sample_id;
  j["true_label"] = dataset.classes.at(r.true_label);
  j["predicted_label"] = dataset.classes.at(r.predicted_label);
  j["target_class"] = dataset.classes.at(r.target_class);
  j["target_mode"] =
      result.contribution.mode == TargetSelection::Mode::kPredicted ? "predicted" : "label";
  j["parts"] = dataset.vocabulary;
  j["histogram"] = optional_array(r.raw);
  j["normalized"] = optional_array(r.normalized);
  j["normalization_applied"] = r.normalization_applied;
  j["argmax_part"] = dataset.vocabulary.at(r.argmax_part);
  j["full_logits"] = result.full_logits;
  j["shapley_matrix"] = {{"parts", result.matrix.part_names},
                         {"classes", result.matrix.class_names},
                         {"values", result.matrix.values}};
  if (result.cache) {
    nlohmann::json logits = nlohmann::json::object();
    for (std::uint64_t bits = 0; bits < result.cache->logits.size(); ++bits) {
      logits[Coalition(bits, result.cache->num_parts).to_string()] = result.cache->logits[bits];
    }
    j["coalition_logits"] = std::move(logits);
    j["evaluations"] = result.cache->logits.size();
  }
  return j;
}

nlohmann::json class_histograms_json(const Dataset& dataset,
                                     std::span<const ClassHistogram> histograms,
                                     RecordFilter filter) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& h : histograms) {
    classes.push_back({{"class", dataset.classes.at(h.class_index)},
                       {"num_samples", h.num_samples},
                       {"counts", h.counts},
                       {"frequencies", h.frequencies},
                       {"mean_contribution_auxiliary", optional_array(h.mean_contribution)}});
  }
  return {{"parts", dataset.vocabulary},
          {"filter", filter == RecordFilter::kCorrectOnly ? "correct-only" : "all"},
          {"classes", classes}};
}

nlohmann::json task_histogram_json(const Dataset& dataset, const TaskHistogram& task) {
  return {{"parts", dataset.vocabulary},
          {"values", task.values},
          {"contributing_classes", task.contributing_classes}};
}

nlohmann::json sanity_json(const InclusionExclusionReport& report,
                           const std::vector<std::optional<double>>& full_accuracy) {
  nlohmann::json per_class = nlohmann::json::array();
  for (unsigned c = 0; c < report.classes.size(); ++c) {
    const auto& order = report.order[c];
    const auto& h = report.class_histograms[c];
    nlohmann::json contribution = nlohmann::json::array();
    for (unsigned k : order) contribution.push_back(h.frequencies[k]);
    per_class.push_back({{"class", report.classes[c]},
                         {"num_samples", h.num_samples},
                         {"parts_by_contribution", names_of(report.vocabulary, order)},
                         {"contribution", contribution},
                         {"inclusion_accuracy", table_json(report.inclusion, order, c)},
                         {"exclusion_accuracy", table_json(report.exclusion, order, c)}});
  }
  nlohmann::json overall;
  overall["parts"] = report.vocabulary;
  overall["inclusion_accuracy"] =
      report.inclusion ? nlohmann::json(report.inclusion->overall) : nlohmann::json(nullptr);
  overall["exclusion_accuracy"] =
      report.exclusion ? nlohmann::json(report.exclusion->overall) : nlohmann::json(nullptr);
  const std::vector<std::optional<double>> per_class_full(full_accuracy.begin(),
                                                          full_accuracy.end() - 1);
  return {{"classes", report.classes},
          {"parts", report.vocabulary},
          {"full_image_accuracy",
           {{"per_class", optional_array(per_class_full)}, {"overall", *full_accuracy.back()}}},
          {"per_class", per_class},
          {"overall", overall}};
}

std::string sanity_csv(const InclusionExclusionReport& report) {
  std::ostringstream out;
  out << "class,rank,part,contribution,inclusion_accuracy,exclusion_accuracy\n";
  for (unsigned c = 0; c < report.classes.size(); ++c) {
    const auto& order = report.order[c];
    for (unsigned rank = 0; rank < order.size(); ++rank) {
      const unsigned k = order[rank];
      out << report.classes[c] << ',' << rank << ',' << report.vocabulary[k] << ','
          << format_double(report.class_histograms[c].frequencies[k]) << ','
          << (report.inclusion ? csv_cell(report.inclusion->per_class[k][c]) : "") << ','
          << (report.exclusion ? csv_cell(report.exclusion->per_class[k][c]) : "") << '\n';
    }
  }
  return out.str();
}

nlohmann::json annotation_json(const Dataset& dataset, const AnnotationComparison& comparison) {
  nlohmann::json classes = nlohmann::json::array();
  for (unsigned c = 0; c < comparison.classes.size(); ++c) {
    const auto& s = comparison.similarity[c];
    classes.push_back({{"class", comparison.classes[c]},
                       {"similarity", s ? nlohmann::json(*s) : nlohmann::json(nullptr)},
                       {"histogram_a", comparison.histograms_a[c].frequencies},
                       {"histogram_b", comparison.histograms_b[c].frequencies}});
  }
  return {{"parts", dataset.vocabulary},
          {"classes", classes},
          {"average_similarity",
           comparison.average ? nlohmann::json(*comparison.average) : nlohmann::json(nullptr)}};
}

std::string annotation_csv(const AnnotationComparison& comparison) {
  std::ostringstream out;
  out << "class,similarity\n";
  for (unsigned c = 0; c < comparison.classes.size(); ++c) {
    out << comparison.classes[c] << ',' << csv_cell(comparison.similarity[c]) << '\n';
  }
  out << "average," << csv_cell(comparison.average) << '\n';
  return out.str();
}

}  // namespace pceve::cli
