#pragma once

#include <span>
#include <vector>

#include "pack/problem.hpp"

namespace pack {

// Hubert-Arabie adjusted Rand index of two hard labelings.  Computed from
// integer pair counts with a single final division.  When the expected and
// maximum index coincide the result is 1 for identical partitions, else 0.
double adjusted_rand_index(std::span<const long> a, std::span<const long> b);

// Hardened labels: the largest membership per point (lowest center on
// ties); points whose outlier share dominates get label -1.
std::vector<long> hardened_labels(const Assignment& assignment);

enum class SummaryWeighting { PerPoint, PerDemand };

struct DistanceSummary {
  double mean = 0.0;
  double median = 0.0;
  double q95 = 0.0;
  std::size_t count = 0;
};

// Per-point distance to the assigned center(s) (membership-weighted for
// fractional or multi-center rows), over non-pseudo points that are not
// fully outliers.  PerPoint uses type-7 (linear interpolation) quantiles;
// PerDemand weights each point by w and uses the weighted inverse CDF.
DistanceSummary distance_summary(const Problem& problem, const Solution& solution,
                                 SummaryWeighting weighting = SummaryWeighting::PerPoint);

// Statistics of raw values, exposed for reuse and testing.
DistanceSummary summarize(std::vector<double> values, std::vector<double> weights,
                          SummaryWeighting weighting);

// Type-7 sample quantile of sorted values.
double quantile_type7(std::span<const double> sorted, double p);

}  // namespace pack
