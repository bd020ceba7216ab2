#pragma once

#include <string>

#include "pack/problem.hpp"

namespace pack {

struct PlotOptions {
  int width = 640;
  int height = 640;
  double margin = 24.0;
};

// SVG scatter of a solution: points filled by hardened cluster label with
// area proportional to w, outliers drawn hollow, centers as crosses and fixed
// centers as squares (dashed when released).  Returns an empty string when
// the instance has no coordinates to draw.
std::string render_svg(const Problem& problem, const Solution& solution,
                       const PlotOptions& options = {});

}  // namespace pack
