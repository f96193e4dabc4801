// Writes a seeded synthetic part dataset (images, manifest.jsonl, model.json).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pceve/error.hpp"
#include "pceve/testkit/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic part dataset generator", "pceve-synth"};
  std::string out;
  std::uint64_t seed = 1;
  unsigned parts = 3, classes = 2, per_class = 10;
  int size = 64;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--parts", parts)->capture_default_str();
  app.add_option("--classes", classes)->capture_default_str();
  app.add_option("--per-class", per_class)->capture_default_str();
  app.add_option("--size", size, "Image side in pixels")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    pceve::testkit::SyntheticOptions options;
    options.image_size = size;
    const auto synthetic = pceve::testkit::make_synthetic_dataset(seed, parts, classes, per_class, options);
    pceve::testkit::write_synthetic_dataset(synthetic, out);
    std::cout << "wrote " << synthetic.dataset.samples.size() << " samples to " << out << "\n";
  } catch (const pceve::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  }
  return 0;
}
