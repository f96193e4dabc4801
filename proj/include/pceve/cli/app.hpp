#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pceve::cli {

// Everything that determines a run's results. Output directory and thread
// count are deliberately absent: they must not change the result store.
struct RunConfig {
  std::string command;
  std::string manifest;
  std::string manifest_b;
  std::string model;
  std::string sample;
  std::string target_class;
  std::string mode;
  bool include_misclassified = false;
  std::uint64_t mc_permutations = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

// Runs one command and writes its result store under out_dir. Throws
// pceve::Error.
void execute(const RunConfig& config, const std::filesystem::path& out_dir, unsigned jobs,
             std::ostream& log);

// Entry point of the `pceve` tool; args exclude the program name. Returns the
// process exit code: 0 ok, 2 usage, 3 data error, 4 model error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pceve::cli
