#include "pack/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pack {
namespace {

// Tableau-like qualitative palette; labels cycle through it.
constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Problem& problem, const Solution& solution,
                       const PlotOptions& options) {
  const bool center_coords =
      problem.centers.placement == Placement::Continuous || !problem.centers.candidates.empty();
  std::vector<Vec2> extent;
  for (const Point& p : problem.points) {
    if (p.has_coords) extent.push_back(p.pos);
  }
  if (extent.empty()) return {};
  if (center_coords) {
    for (const Location& c : solution.centers) extent.push_back(c.pos);
  }

  double x0 = extent.front().x, x1 = x0, y0 = extent.front().y, y1 = y0;
  for (const Vec2& v : extent) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
    y0 = std::min(y0, v.y);
    y1 = std::max(y1, v.y);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double inner = std::min(options.width, options.height) - 2.0 * options.margin;
  const double scale = inner / span;
  auto sx = [&](double x) { return options.margin + (x - x0) * scale; };
  // SVG y grows downward.
  auto sy = [&](double y) { return options.height - options.margin - (y - y0) * scale; };

  double w_max = 0.0;
  for (const Point& p : problem.points) w_max = std::max(w_max, p.weight);
  const double r_max = 0.02 * inner;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
     << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  os << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const Point& p = problem.points[i];
    if (!p.has_coords) continue;
    // Area proportional to w; pseudo-points get a fixed small marker.
    const double r = p.pseudo || w_max <= 0.0 ? 0.25 * r_max
                                              : std::max(0.5, r_max * std::sqrt(p.weight / w_max));
    const int label = solution.assignment.hardened_label(i);
    os << "<circle cx=\"" << num(sx(p.pos.x)) << "\" cy=\"" << num(sy(p.pos.y)) << "\" r=\""
       << num(r) << '"';
    if (label < 0) {
      os << " class=\"outlier\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"";
    } else {
      os << " fill=\"" << kPalette[label % 10] << "\" fill-opacity=\"0.75\"";
    }
    os << "/>\n";
  }
  os << "</g>\n";

  if (center_coords) {
    const double h = 0.012 * inner;
    os << "<g class=\"centers\">\n";
    for (std::size_t j = 0; j < solution.centers.size(); ++j) {
      const double cx = sx(solution.centers[j].pos.x), cy = sy(solution.centers[j].pos.y);
      os << "<path class=\"center-cross\" d=\"M" << num(cx - h) << ' ' << num(cy) << "H"
         << num(cx + h) << "M" << num(cx) << ' ' << num(cy - h) << "V" << num(cy + h)
         << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    for (std::size_t l = 0; l < problem.m(); ++l) {
      const Location& home = problem.centers.fixed[l];
      const bool released =
          std::binary_search(solution.released.begin(), solution.released.end(), l);
      os << "<rect class=\"fixed-center\" x=\"" << num(sx(home.pos.x) - h) << "\" y=\""
         << num(sy(home.pos.y) - h) << "\" width=\"" << num(2 * h) << "\" height=\""
         << num(2 * h) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\""
         << (released ? " stroke-dasharray=\"3 2\"" : "") << "/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pack
