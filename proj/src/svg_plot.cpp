#include "clocksim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "clocksim/errors.hpp"

namespace clocksim {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 25.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

const char* kSeriesColors[] = {"#1f77b4", "#9467bd", "#ff7f0e", "#2ca02c",
                               "#d62728", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double tick = 0.25;
};

Axis nice_axis(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  if (hi - lo < 1e-12) {  // degenerate span: pad around the value
    lo -= 1.0;
    hi += 1.0;
  }
  const double span = hi - lo;
  const double raw_tick = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_tick)));
  double tick = mag;
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw_tick <= m * mag) {
      tick = m * mag;
      break;
    }
  }
  Axis axis;
  axis.tick = tick;
  axis.lo = std::floor(lo / tick) * tick;
  axis.hi = std::ceil(hi / tick) * tick;
  return axis;
}

}  // namespace

std::string render_line_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw InvalidParameter("chart needs at least one series");
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  std::size_t total_points = 0;
  for (const auto& series : spec.series) {
    for (const auto& [x, y] : series.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
      ++total_points;
    }
  }
  if (total_points == 0) throw InvalidParameter("chart needs at least one point");
  if (spec.dashed_y) {
    y_lo = std::min(y_lo, *spec.dashed_y);
    y_hi = std::max(y_hi, *spec.dashed_y);
  }
  const Axis xa = nice_axis(x_lo, x_hi);
  const Axis ya = nice_axis(y_lo, y_hi);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (ya.hi - y) / (ya.hi - ya.lo) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
         num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + escape(spec.title) + "</text>\n";

  // grid and ticks
  for (double t = xa.lo; t <= xa.hi + 1e-9; t += xa.tick) {
    const double x = sx(t);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" + num(x) +
           "\" y2=\"" + num(kMarginTop + plot_h) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kMarginTop + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(t) + "</text>\n";
  }
  for (double t = ya.lo; t <= ya.hi + 1e-9; t += ya.tick) {
    const double y = sy(t);
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(y) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + num(kMarginLeft - 8) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(t) +
           "</text>\n";
  }
  svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";

  svg += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(kMarginTop + plot_h / 2) + ")\">" +
         escape(spec.y_label) + "</text>\n";

  if (spec.dashed_y) {
    const double y = sy(*spec.dashed_y);
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(y) +
           "\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n";
  }

  int color = 0;
  double legend_y = kMarginTop + 14;
  for (const auto& series : spec.series) {
    const char* stroke = kSeriesColors[color % 6];
    if (series.points.size() > 1) {
      std::string pts;
      for (const auto& [x, y] : series.points) {
        pts += num(sx(x)) + "," + num(sy(y)) + " ";
      }
      if (!pts.empty()) pts.pop_back();
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
             "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    }
    for (const auto& [x, y] : series.points) {
      svg += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) +
             "\" r=\"3.5\" fill=\"" + std::string(stroke) + "\"/>\n";
    }
    if (!series.label.empty()) {
      svg += "<text x=\"" + num(kMarginLeft + plot_w - 6) + "\" y=\"" + num(legend_y) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" +
             std::string(stroke) + "\">" + escape(series.label) + "</text>\n";
      legend_y += 14;
    }
    ++color;
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> write_sweep_charts(
    const nlohmann::json& sweep_report, const std::filesystem::path& out_dir) {
  if (!sweep_report.contains("pooled") || sweep_report["pooled"].empty()) {
    throw InvalidParameter("sweep report has no pooled rows to plot");
  }
  std::filesystem::create_directories(out_dir);

  struct Chart {
    const char* file;
    const char* title;
    const char* y_label;
    const char* field;
    bool wage_line;
  };
  const Chart charts[] = {
      {"price_vs_drivers.svg", "Average driver price", "price ($)", "avg_price", true},
      {"rounds_vs_drivers.svg", "Average auction rounds", "rounds", "avg_rounds", false},
      {"profit_share_vs_drivers.svg", "Platform profit share", "share", "profit_share",
       false},
      {"earnings_vs_drivers.svg", "Average driver earnings", "earnings ($)",
       "avg_driver_earnings", false},
  };

  std::vector<std::filesystem::path> written;
  for (const auto& chart : charts) {
    Series series;
    for (const auto& row : sweep_report["pooled"]) {
      if (!row.contains(chart.field)) continue;
      series.points.emplace_back(row["drivers"].get<double>(),
                                 row[chart.field].get<double>());
    }
    if (series.points.empty()) continue;
    ChartSpec spec;
    spec.title = chart.title;
    spec.x_label = "number of drivers";
    spec.y_label = chart.y_label;
    spec.series.push_back(std::move(series));
    if (chart.wage_line && sweep_report.contains("market")) {
      spec.dashed_y = sweep_report["market"]["reservation_wage"].get<double>();
    }
    const auto path = out_dir / chart.file;
    std::ofstream(path) << render_line_chart(spec);
    written.push_back(path);
  }
  return written;
}

}  // namespace clocksim
