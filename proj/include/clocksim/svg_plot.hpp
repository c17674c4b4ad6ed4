#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace clocksim {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> dashed_y;  // horizontal red reference line
};

/// Dependency-free SVG line chart. Single points render as markers with no
/// interpolation; output is deterministic text, friendly to diffing.
std::string render_line_chart(const ChartSpec& spec);

/// Emits the four standard charts from a sweep report document:
/// price_vs_drivers.svg (with the reservation wage as a dashed line),
/// rounds_vs_drivers.svg, profit_share_vs_drivers.svg and
/// earnings_vs_drivers.svg. Returns the written paths.
std::vector<std::filesystem::path> write_sweep_charts(
    const nlohmann::json& sweep_report, const std::filesystem::path& out_dir);

}  // namespace clocksim
