#include "pceve/cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include <CLI11.hpp>
#include <omp.h>

#include "pceve/cli/model_spec.hpp"
#include "pceve/cli/result_store.hpp"
#include "pceve/cli/svg.hpp"
#include "pceve/error.hpp"
#include "pceve/model_config.hpp"
#include "pceve/sanity.hpp"

namespace pceve::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377"};

std::string absolute_path(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

void require(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw Error(ErrorCode::kUsage, command + " requires " + flag);
}

unsigned resolve_class(const Dataset& dataset, const std::string& text) {
  const auto& names = dataset.classes;
  if (auto it = std::find(names.begin(), names.end(), text); it != names.end()) {
    return static_cast<unsigned>(it - names.begin());
  }
  unsigned index = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
  if (ec == std::errc{} && ptr == text.data() + text.size() && index < names.size()) return index;
  throw Error(ErrorCode::kUsage, "unknown class '" + text + "'");
}

ExplainOptions explain_options(const RunConfig& config) {
  ExplainOptions options;
  options.mc_permutations = config.mc_permutations;
  options.seed = config.seed;
  return options;
}

RecordFilter filter_of(const RunConfig& config) {
  return config.include_misclassified ? RecordFilter::kAll : RecordFilter::kCorrectOnly;
}

std::unique_ptr<ValueFunction> open_model(const RunConfig& config, const Dataset& dataset,
                                          unsigned jobs) {
  require(config.model, "--model", config.command);
  return make_value_function(config.model, dataset.num_classes(), std::max(8u, jobs));
}

std::vector<std::optional<double>> as_optional(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

void write_sample(const ResultStore& store, const Dataset& dataset, const SampleResult& r) {
  store.write_json(fs::path("samples") / (safe_file_stem(r.record.sample_id) + ".json"),
                   sample_json(dataset, r));
}

void plot_class(const ResultStore& store, const Dataset& dataset, const ClassHistogram& h) {
  BarChart chart{"Part contribution: " + dataset.classes[h.class_index] + " (n=" +
                     std::to_string(h.num_samples) + ")",
                 "frequency as top part", dataset.vocabulary,
                 {{dataset.classes[h.class_index], kPalette[0], as_optional(h.frequencies)}}};
  store.write_text(fs::path("plots") / ("class_" + safe_file_stem(dataset.classes[h.class_index]) + ".svg"),
                   render_bar_chart(chart));
}

void cmd_explain_sample(const RunConfig& config, const ResultStore& store, unsigned jobs,
                        std::ostream& log) {
  require(config.sample, "--sample", config.command);
  const Dataset dataset = load_manifest(config.manifest);
  const Sample& sample = dataset.find(config.sample);
  const auto vf = open_model(config, dataset, jobs);

  ExplainOptions options = explain_options(config);
  options.keep_cache = config.mc_permutations == 0;
  if (!config.target_class.empty()) options.target_class = resolve_class(dataset, config.target_class);

  const SampleResult result = explain_dataset_sample(*vf, dataset, sample, options);
  write_sample(store, dataset, result);
  BarChart chart{"Sample " + sample.id + ": target " + dataset.classes[result.record.target_class],
                 "normalized contribution", dataset.vocabulary,
                 {{dataset.classes[result.record.target_class], kPalette[0], result.record.normalized}}};
  store.write_text(fs::path("plots") / ("sample_" + safe_file_stem(sample.id) + ".svg"),
                   render_bar_chart(chart));
  log << sample.id << ": predicted " << dataset.classes[result.record.predicted_label]
      << ", top part " << dataset.vocabulary[result.record.argmax_part] << "\n";
}

void cmd_explain_dataset(const RunConfig& config, const ResultStore& store, unsigned jobs,
                         std::ostream& log, bool task) {
  const Dataset dataset = load_manifest(config.manifest);
  std::optional<unsigned> only;
  if (!config.target_class.empty()) {
    if (task) throw Error(ErrorCode::kUsage, "explain-task does not take --class");
    only = resolve_class(dataset, config.target_class);
  }
  const auto vf = open_model(config, dataset, jobs);
  const auto results = explain_dataset(*vf, dataset, explain_options(config));
  const auto records = records_of(results);
  const RecordFilter filter = filter_of(config);
  auto histograms = class_histograms(records, dataset.num_classes(), dataset.num_parts(), filter);

  for (const auto& r : results) {
    if (!only || r.record.true_label == *only) write_sample(store, dataset, r);
  }

  if (task) {
    const TaskHistogram t = task_histogram(histograms);
    store.write_json("class_histograms.json", class_histograms_json(dataset, histograms, filter));
    store.write_json("task_histogram.json", task_histogram_json(dataset, t));
    for (const auto& h : histograms) plot_class(store, dataset, h);
    BarChart chart{"Task-level part contribution", "sum of class frequencies", dataset.vocabulary,
                   {{"task", kPalette[0], as_optional(t.values)}}};
    store.write_text("plots/task.svg", render_bar_chart(chart));
    log << "task histogram over " << t.contributing_classes << " classes\n";
    return;
  }

  if (only) histograms = {histograms[*only]};
  store.write_json("class_histograms.json", class_histograms_json(dataset, histograms, filter));
  for (const auto& h : histograms) {
    plot_class(store, dataset, h);
    log << dataset.classes[h.class_index] << ": " << h.num_samples << " samples\n";
  }
}

void cmd_sanity(const RunConfig& config, const ResultStore& store, unsigned jobs, std::ostream& log) {
  const Dataset dataset = load_manifest(config.manifest);
  SanityOptions options;
  options.filter = filter_of(config);
  options.explain = explain_options(config);

  if (config.mode == "annotation-compare") {
    require(config.manifest_b, "--manifest-b", config.command);
    const Dataset other = load_manifest(config.manifest_b);
    const auto vf = open_model(config, dataset, jobs);
    const auto cmp = compare_annotation_sources(*vf, dataset, other, options);
    store.write_json("sanity_annotation-compare.json", annotation_json(dataset, cmp));
    store.write_text("sanity_annotation-compare.csv", annotation_csv(cmp));
    BarChart chart{"Histogram similarity between annotation sources", "cosine similarity",
                   cmp.classes, {{"similarity", kPalette[0], cmp.similarity}}};
    store.write_text("plots/sanity_annotation-compare.svg", render_bar_chart(chart));
    log << "average similarity "
        << (cmp.average ? format_double(*cmp.average) : std::string("n/a")) << "\n";
    return;
  }

  const bool inclusion = config.mode == "inclusion";
  if (!inclusion && config.mode != "exclusion") {
    throw Error(ErrorCode::kUsage, "unknown sanity mode '" + config.mode + "'");
  }
  options.inclusion = inclusion;
  options.exclusion = !inclusion;
  const auto vf = open_model(config, dataset, jobs);
  const auto report = run_inclusion_exclusion(*vf, dataset, options);
  const auto full = full_image_accuracy(*vf, dataset);
  const std::string stem = "sanity_" + config.mode;
  store.write_json(stem + ".json", sanity_json(report, full));
  store.write_text(stem + ".csv", sanity_csv(report));

  const AccuracyTable& table = inclusion ? *report.inclusion : *report.exclusion;
  for (unsigned c = 0; c < report.classes.size(); ++c) {
    std::vector<std::string> names;
    std::vector<std::optional<double>> contribution, accuracy;
    for (unsigned k : report.order[c]) {
      names.push_back(report.vocabulary[k]);
      contribution.push_back(report.class_histograms[c].frequencies[k]);
      accuracy.push_back(table.per_class[k][c]);
    }
    BarChart chart{config.mode + " test: " + report.classes[c], "value", names,
                   {{"contribution", kPalette[0], contribution},
                    {config.mode + " accuracy", kPalette[1], accuracy}}};
    store.write_text(fs::path("plots") / (stem + "_" + safe_file_stem(report.classes[c]) + ".svg"),
                     render_bar_chart(chart));
  }
  log << config.mode << " test over " << dataset.samples.size() << " samples\n";
}

void cmd_generate_masks(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  require(config.sample, "--sample", config.command);
  const Dataset dataset = load_manifest(config.manifest);
  const Sample& sample = dataset.find(config.sample);
  const CoalitionImageSet set = generate_set(sample.image, sample.parts);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  for (std::uint64_t bits = 0; bits < set.size(); ++bits) {
    const Coalition c(bits, set.num_parts());
    write_image(out_dir / (c.to_string() + ".png"), set.render(c));
  }
  log << "wrote " << set.size() << " images to " << out_dir.string() << "\n";
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},
          {"manifest", manifest},
          {"manifest_b", manifest_b},
          {"model", model},
          {"sample", sample},
          {"class", target_class},
          {"mode", mode},
          {"include_misclassified", include_misclassified},
          {"mc_permutations", mc_permutations},
          {"seed", seed}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.manifest = j.value("manifest", "");
    c.manifest_b = j.value("manifest_b", "");
    c.model = j.value("model", "");
    c.sample = j.value("sample", "");
    c.target_class = j.value("class", "");
    c.mode = j.value("mode", "");
    c.include_misclassified = j.value("include_misclassified", false);
    c.mc_permutations = j.value<std::uint64_t>("mc_permutations", 0);
    c.seed = j.value<std::uint64_t>("seed", 0);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kUsage, std::string("bad run snapshot: ") + e.what());
  }
}

void execute(const RunConfig& config, const fs::path& out_dir, unsigned jobs, std::ostream& log) {
  if (jobs > 0) omp_set_num_threads(static_cast<int>(jobs));
  require(config.manifest, "--manifest", config.command);

  if (config.command == "generate-masks") {
    cmd_generate_masks(config, out_dir, log);
    return;
  }

  const ResultStore store(out_dir);
  if (config.command == "explain-sample") {
    cmd_explain_sample(config, store, jobs, log);
  } else if (config.command == "explain-class") {
    cmd_explain_dataset(config, store, jobs, log, false);
  } else if (config.command == "explain-task") {
    cmd_explain_dataset(config, store, jobs, log, true);
  } else if (config.command == "sanity") {
    cmd_sanity(config, store, jobs, log);
  } else {
    throw Error(ErrorCode::kUsage, "unknown command '" + config.command + "'");
  }
  store.write_json("config.json", config.to_json());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Part-based Shapley explanations for image classifiers", "pceve"};
  app.require_subcommand(1);

  RunConfig config;
  std::string out_dir = "pceve_out";
  unsigned jobs = 0;
  app.add_option("--manifest", config.manifest, "Dataset manifest (JSON lines)");
  app.add_option("--model", config.model,
                 "toy:additive:<json> | toy:table:<json> | exec:<command> | http:<url>");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads (0 = OpenMP default)");
  app.add_option("--seed", config.seed, "Seed for the permutation estimator");
  app.add_option("--class", config.target_class, "Class name or index");
  app.add_flag("--include-misclassified", config.include_misclassified,
               "Aggregate over all samples, not only correctly classified ones");
  app.add_option("--mc-permutations", config.mc_permutations,
                 "Use the permutation estimator with this many orderings (0 = exact)");
  app.add_option("--sample", config.sample, "Sample id");

  app.add_subcommand("explain-sample", "Part contributions for one sample")->fallthrough();
  app.add_subcommand("explain-class", "Class-level part histograms")->fallthrough();
  app.add_subcommand("explain-task", "Task-level part histogram")->fallthrough();
  auto* sanity = app.add_subcommand("sanity", "Inclusion/exclusion tests and annotation comparison");
  sanity->fallthrough();
  sanity->add_option("--mode", config.mode)
      ->required()
      ->check(CLI::IsMember({"inclusion", "exclusion", "annotation-compare"}));
  sanity->add_option("--manifest-b", config.manifest_b, "Second manifest for annotation-compare");
  app.add_subcommand("generate-masks", "Write the 2^K coalition images of one sample")->fallthrough();
  std::string snapshot;
  auto* replay = app.add_subcommand("replay", "Re-run from a stored config.json");
  replay->fallthrough();
  replay->add_option("snapshot", snapshot)->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) {
      config = RunConfig::from_json(read_json_file(snapshot));
    } else {
      config.command = app.get_subcommands().front()->get_name();
      config.manifest = absolute_path(config.manifest);
      config.manifest_b = absolute_path(config.manifest_b);
      if (!config.model.empty()) config.model = canonical_model_spec(config.model);
    }
    execute(config, out_dir, jobs, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCategory::kData);
  }
}

}  // namespace pceve::cli
