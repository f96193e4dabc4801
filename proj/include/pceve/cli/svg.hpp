#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pceve::cli {

struct BarSeries {
  std::string name;
  std::string color;
  std::vector<std::optional<double>> values;  // nullopt draws no bar
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> categories;
  std::vector<BarSeries> series;
};

// Self-contained SVG with labelled axes; grouped bars when there are several
// series. The y range spans zero and every finite value.
std::string render_bar_chart(const BarChart& chart);

}  // namespace pceve::cli
