#pragma once

#include <cstddef>
#include <span>

#include "pack/problem.hpp"

namespace pack {

// Weighted mean of `points`.
Vec2 weighted_mean(std::span<const Vec2> points, std::span<const double> masses);

// Coordinatewise weighted median (the lower median when the cumulative mass
// hits exactly one half).  Minimizes the weighted Manhattan distance.
Vec2 weighted_median(std::span<const Vec2> points, std::span<const double> masses);

struct GeometricMedian {
  Vec2 center;
  int iterations = 0;
  bool hit_iteration_cap = false;
};

// Weighted geometric median by Weiszfeld iteration started from the weighted
// mean.  Stops once a step is shorter than 1e-9 times the data diameter.  An
// iterate landing on a data point (within 1e-12 of the diameter) takes the
// Kuhn step away from it, or stops there when that point is optimal.  The
// result is polished by loss-decreasing Newton steps.
GeometricMedian geometric_median(std::span<const Vec2> points, std::span<const double> masses,
                                 int max_iterations = 1000);

// Optimal continuous center for a geometric metric given per-point masses
// (w'_i * y_ij).  Throws EmptyCluster when the masses sum to zero.
GeometricMedian update_center_continuous(const MetricSpec& metric, std::span<const Vec2> points,
                                         std::span<const double> masses);

// Candidate site minimizing sum_i masses[i] * d(x_i, p_h); lowest index on
// ties.  `masses` is indexed by point.  Throws EmptyCluster.
std::size_t update_center_discrete(const Problem& problem, std::span<const double> masses);

// sum_i masses[i] * d(x_i, location).
double cluster_loss(const Problem& problem, std::span<const double> masses,
                    const Location& location);

// Optimal free location for the cluster given by `masses` under the
// problem's placement rule.  Throws EmptyCluster.
Location optimal_location(const Problem& problem, std::span<const double> masses,
                          int* weiszfeld_cap_hits = nullptr);

struct ReleaseDecision {
  bool released = false;
  Location location;
  // loss(f_l) - loss(best free location); zero for an empty cluster.
  double gain = 0.0;
};

// Release / reattach rule for fixed center `fixed_index`.  A kept center is
// released iff the loss reduction from relocating exceeds lambda_f; a
// released center returns to f_l iff that reduction is below lambda_f.
// `current` is where the center sits now.
ReleaseDecision decide_release(const Problem& problem, std::size_t fixed_index,
                               std::span<const double> masses, bool currently_released,
                               const Location& current, int* weiszfeld_cap_hits = nullptr);

}  // namespace pack
