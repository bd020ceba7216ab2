#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "pack/geometry.hpp"

namespace pack {

struct Problem;

enum class MetricKind { SquaredEuclidean, Euclidean, Manhattan, Threshold, Matrix };

// Where a center sits.  In discrete placement `site` indexes the candidate
// list (and `pos` mirrors the candidate's coordinates when it has any); in
// continuous placement `site` is -1.
struct Location {
  Vec2 pos;
  std::ptrdiff_t site = -1;

  bool is_site() const { return site >= 0; }
  friend bool operator==(const Location&, const Location&) = default;
};

class MetricSpec {
 public:
  static MetricSpec squared_euclidean() { return MetricSpec(MetricKind::SquaredEuclidean); }
  static MetricSpec euclidean() { return MetricSpec(MetricKind::Euclidean); }
  static MetricSpec manhattan() { return MetricSpec(MetricKind::Manhattan); }
  // Cost 0 strictly inside `radius` (Euclidean), 1 at or beyond it.
  static MetricSpec threshold(double radius);
  // `costs(i, h)` is the cost from point i to candidate site h.
  static MetricSpec matrix(Matrix costs);

  MetricKind kind() const { return kind_; }
  double threshold_radius() const { return radius_; }
  const Matrix& costs() const { return *costs_; }

  // True for metrics that are computed from coordinates and admit a
  // continuous location step.
  bool is_geometric() const {
    return kind_ == MetricKind::SquaredEuclidean || kind_ == MetricKind::Euclidean ||
           kind_ == MetricKind::Manhattan;
  }
  bool requires_discrete() const { return !is_geometric(); }

  std::string name() const;

 private:
  explicit MetricSpec(MetricKind kind) : kind_(kind) {}

  MetricKind kind_ = MetricKind::SquaredEuclidean;
  double radius_ = 0.0;
  std::shared_ptr<const Matrix> costs_;
};

// Coordinate-based distance.  Not valid for the Matrix metric.
double coordinate_distance(const MetricSpec& metric, const Vec2& a, const Vec2& b);

// Distance from data point `point_index` (located at `point_pos`) to a center.
// Throws MatrixIndexOutOfRange for a bad matrix lookup.
double distance(const MetricSpec& metric, std::size_t point_index, const Vec2& point_pos,
                const Location& center);

// n x k matrix of raw distances d(x_i, c_j).
Matrix distance_table(const Problem& problem, std::span<const Location> centers);

// n x k matrix of weighted costs w'_i * d(x_i, c_j).
Matrix pairwise_costs(const Problem& problem, std::span<const Location> centers);

}  // namespace pack
