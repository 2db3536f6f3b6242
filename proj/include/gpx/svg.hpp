#pragma once

// Minimal static SVG emission for crossing plots: the process, the threshold
// curve and circle markers at crossings. No external plotting dependency.

#include <string>
#include <vector>

namespace gpx::svg {

struct PlotOptions {
  int width = 960;
  int height = 540;
  std::string title = "order-statistics process vs threshold";
  int max_points = 2400;  // min/max decimation budget per curve
};

void write_crossing_plot(const std::vector<double>& t, const std::vector<double>& x,
                         const std::vector<double>& f, const std::vector<int>& crossed,
                         const std::string& path, const PlotOptions& options = {});

}  // namespace gpx::svg
