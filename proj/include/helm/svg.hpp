#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "helm/runlog_io.hpp"

namespace helm {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal multi-series line chart. Non-finite samples break the line.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

enum class PlotKind { YawError, Thrust, Trajectory };

PlotKind parse_plot_kind(std::string_view text);

std::string plot_runlog(const CsvTable& log, PlotKind kind);

} // namespace helm
