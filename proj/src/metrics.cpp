#include "pack/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "pack/error.hpp"
#include "pack/problem.hpp"

namespace pack {

MetricSpec MetricSpec::threshold(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidProblem, "threshold radius must be positive and finite");
  }
  MetricSpec m(MetricKind::Threshold);
  m.radius_ = radius;
  return m;
}

MetricSpec MetricSpec::matrix(Matrix costs) {
  for (double v : costs.data()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidProblem, "distance matrix entries must be finite and >= 0");
    }
  }
  MetricSpec m(MetricKind::Matrix);
  m.costs_ = std::make_shared<const Matrix>(std::move(costs));
  return m;
}

std::string MetricSpec::name() const {
  switch (kind_) {
    case MetricKind::SquaredEuclidean: return "sqeuclidean";
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Manhattan: return "manhattan";
    case MetricKind::Threshold: {
      // Shortest representation that round-trips.
      char buf[64];
      std::snprintf(buf, sizeof buf, "threshold:%.17g", radius_);
      return buf;
    }
    case MetricKind::Matrix: return "matrix";
  }
  return "unknown";
}

double coordinate_distance(const MetricSpec& metric, const Vec2& a, const Vec2& b) {
  const Vec2 d = a - b;
  switch (metric.kind()) {
    case MetricKind::SquaredEuclidean: return squared_norm(d);
    case MetricKind::Euclidean: return norm(d);
    case MetricKind::Manhattan: return std::abs(d.x) + std::abs(d.y);
    case MetricKind::Threshold: return norm(d) < metric.threshold_radius() ? 0.0 : 1.0;
    case MetricKind::Matrix: break;
  }
  throw Error(ErrorCode::InvalidProblem, "matrix metric has no coordinate form");
}

double distance(const MetricSpec& metric, std::size_t point_index, const Vec2& point_pos,
                const Location& center) {
  if (metric.kind() != MetricKind::Matrix) return coordinate_distance(metric, point_pos, center.pos);
  const Matrix& costs = metric.costs();
  if (point_index >= costs.rows() || center.site < 0 ||
      static_cast<std::size_t>(center.site) >= costs.cols()) {
    throw Error(ErrorCode::MatrixIndexOutOfRange,
                "entry (" + std::to_string(point_index) + ", " + std::to_string(center.site) +
                    ") outside " + std::to_string(costs.rows()) + "x" +
                    std::to_string(costs.cols()));
  }
  return costs(point_index, static_cast<std::size_t>(center.site));
}

Matrix distance_table(const Problem& problem, std::span<const Location> centers) {
  Matrix d(problem.n(), centers.size());
  for (std::size_t i = 0; i < problem.n(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      d(i, j) = distance(problem.metric, i, problem.points[i].pos, centers[j]);
    }
  }
  return d;
}

Matrix pairwise_costs(const Problem& problem, std::span<const Location> centers) {
  Matrix c = distance_table(problem, centers);
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const double w = problem.points[i].effective_weight();
    for (std::size_t j = 0; j < centers.size(); ++j) c(i, j) *= w;
  }
  return c;
}

}  // namespace pack
