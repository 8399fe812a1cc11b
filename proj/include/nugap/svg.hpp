#pragma once

#include <string>
#include <vector>

#include "nugap/cluster.hpp"

namespace nugap::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  /// Drawn dashed when set.
  bool dashed = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  /// Optional symmetric clamp of y values (0 = none), keeps diverging
  /// responses from flattening the rest of the plot.
  double y_clip = 0.0;
};

std::string line_plot(const std::vector<Series>& series, const PlotOptions& opt);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
  int group = 0;
  bool highlight = false;
};

std::string scatter(const std::vector<ScatterPoint>& points, const PlotOptions& opt);

/// Dendrogram with leaves in merge order and a horizontal line at the cut.
std::string dendrogram(const cluster::Dendrogram& dend, const std::vector<std::string>& labels, double cut,
                       const std::string& title);

std::string escape(const std::string& text);

}  // namespace nugap::svg
