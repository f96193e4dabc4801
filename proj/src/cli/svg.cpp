#include "pceve/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pceve::cli {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string render_bar_chart(const BarChart& chart) {
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 70, kPlotH = 260;
  const double group_w = std::max(40.0, 24.0 * static_cast<double>(chart.series.size()) + 16.0);
  const double plot_w = group_w * static_cast<double>(std::max<std::size_t>(chart.categories.size(), 1));
  const double width = kLeft + plot_w + kRight;
  const double height = kTop + kPlotH + kBottom;

  double lo = 0.0, hi = 0.0;
  for (const auto& s : chart.series) {
    for (const auto& v : s.values) {
      if (v && std::isfinite(*v)) {
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const auto y_of = [&](double v) { return kTop + kPlotH * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(chart.title) << "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + plot_w)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
  }
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y_of(0)) << "\" x2=\""
      << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(y_of(0)) << "\" stroke=\"black\"/>\n";
  svg << "<text transform=\"translate(16," << fmt(kTop + kPlotH / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

  const double bar_w = (group_w - 16.0) / static_cast<double>(std::max<std::size_t>(chart.series.size(), 1));
  for (std::size_t i = 0; i < chart.categories.size(); ++i) {
    const double gx = kLeft + group_w * static_cast<double>(i) + 8.0;
    for (std::size_t s = 0; s < chart.series.size(); ++s) {
      const auto& series = chart.series[s];
      if (i >= series.values.size() || !series.values[i]) continue;
      const double v = *series.values[i];
      const double y0 = y_of(std::max(v, 0.0));
      const double y1 = y_of(std::min(v, 0.0));
      svg << "<rect x=\"" << fmt(gx + bar_w * static_cast<double>(s)) << "\" y=\"" << fmt(y0)
          << "\" width=\"" << fmt(bar_w - 2) << "\" height=\"" << fmt(y1 - y0) << "\" fill=\""
          << escape(series.color) << "\"><title>" << escape(series.name) << ": " << tick_label(v)
          << "</title></rect>\n";
    }
    const double cx = kLeft + group_w * (static_cast<double>(i) + 0.5);
    svg << "<text transform=\"translate(" << fmt(cx) << "," << fmt(kTop + kPlotH + 14)
        << ") rotate(30)\">" << escape(chart.categories[i]) << "</text>\n";
  }

  double lx = kLeft;
  for (const auto& s : chart.series) {
    svg << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(height - 18) << "\" width=\"10\" height=\"10\" fill=\""
        << escape(s.color) << "\"/><text x=\"" << fmt(lx + 14) << "\" y=\"" << fmt(height - 9) << "\">"
        << escape(s.name) << "</text>\n";
    lx += 110;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pceve::cli
