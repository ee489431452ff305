#pragma once

#include "geodesica/core.hpp"

#include <string>
#include <vector>

namespace geodesica::svg {

struct ScatterStyle {
  double width = 480.0;        // pixels
  double point_radius = 0.006; // fraction of the larger data extent
  std::string color = "#1f4e79";
  std::vector<int> labels;     // optional; one per point, colors cycle through a fixed palette
  std::string title;
};

// 2-D scatter plot; the viewBox is the data bounding box grown by 5% per side.
std::string emit_svg_scatter(const Configuration& config, const ScatterStyle& style = {});

}  // namespace geodesica::svg
