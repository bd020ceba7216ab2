#include "instances.hpp"

#include <algorithm>
#include <cmath>

namespace testing_support {

double uniform(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Engine& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

namespace {

pack::MetricSpec random_geometric_metric(Engine& rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: return pack::MetricSpec::squared_euclidean();
    case 1: return pack::MetricSpec::euclidean();
    default: return pack::MetricSpec::manhattan();
  }
}

}  // namespace

AllocationCase small_allocation_case(Engine& rng, pack::Membership membership) {
  AllocationCase c;
  pack::Problem& p = c.problem;
  const int n = uniform_int(rng, 1, 8);
  const int k = uniform_int(rng, 1, 3);
  const bool equal_a = uniform(rng, 0, 1) < 0.3;
  const double common_a = uniform_int(rng, 1, 4);
  double total_a = 0.0;
  for (int i = 0; i < n; ++i) {
    pack::Point pt;
    pt.id = i + 1;
    pt.pos = {uniform(rng, 0, 1), uniform(rng, 0, 1)};
    pt.weight = uniform(rng, 0.5, 2.0);
    pt.preference = uniform(rng, 0, 1) < 0.2 ? uniform(rng, 0, 1) : 0.0;
    pt.capacity_coeff = equal_a ? common_a
                        : uniform(rng, 0, 1) < 0.5 ? uniform_int(rng, 1, 5)
                                                   : uniform(rng, 0.2, 3.0);
    total_a += pt.capacity_coeff;
    p.points.push_back(pt);
  }
  p.metric = random_geometric_metric(rng);
  p.centers.k = k;
  p.membership = membership;
  if (uniform(rng, 0, 1) < 0.4) p.outlier_lambda = uniform(rng, 0.02, 0.6);
  const double mean = total_a / k;
  pack::CapacityWindow w;
  w.lower = uniform(rng, 0, 1) < 0.3 ? 0.0 : uniform(rng, 0.0, mean);
  w.upper = uniform(rng, 0, 1) < 0.1 ? pack::kInfinity : mean + uniform(rng, 0.0, mean);
  p.capacity = w;
  for (int j = 0; j < k; ++j) c.centers.push_back({{uniform(rng, 0, 1), uniform(rng, 0, 1)}, -1});
  return c;
}

pack::Problem medium_case(Engine& rng, pack::Membership membership) {
  pack::Problem p;
  const std::size_t n = 200;
  const int k = 8;
  // A few clusters plus background noise.
  std::vector<pack::Vec2> means;
  for (int c = 0; c < 6; ++c) means.push_back({uniform(rng, 0.1, 0.9), uniform(rng, 0.1, 0.9)});
  std::normal_distribution<double> gauss(0.0, 0.06);
  const bool coverage_two = membership == pack::Membership::Fractional && uniform(rng, 0, 1) < 0.3;
  for (std::size_t i = 0; i < n; ++i) {
    pack::Point pt;
    pt.id = static_cast<std::int64_t>(i) + 1;
    if (i % 10 == 9) {
      pt.pos = {uniform(rng, 0, 1), uniform(rng, 0, 1)};
    } else {
      const pack::Vec2 m = means[i % means.size()];
      pt.pos = {m.x + gauss(rng), m.y + gauss(rng)};
    }
    pt.weight = uniform(rng, 1, 100);
    pt.capacity_coeff = pt.weight;
    if (coverage_two && i % 7 == 0) pt.coverage = 2;
    p.points.push_back(pt);
  }
  if (uniform(rng, 0, 1) < 0.3) {
    p.points.push_back(pack::make_pseudo_point(1000, {uniform(rng, 0, 1), uniform(rng, 0, 1)},
                                               uniform(rng, 10, 200)));
  }

  const bool discrete = uniform(rng, 0, 1) < 0.25;
  p.metric = random_geometric_metric(rng);
  p.centers.k = k;
  p.membership = membership;
  if (discrete) {
    p.centers.placement = pack::Placement::Discrete;
    for (int h = 0; h < 40; ++h) p.centers.candidates.push_back({uniform(rng, 0, 1), uniform(rng, 0, 1)});
  }
  if (uniform(rng, 0, 1) < 0.3) {
    const int m = uniform_int(rng, 1, 2);
    for (int l = 0; l < m; ++l) {
      const pack::Vec2 f = discrete ? p.centers.candidates[l] : pack::Vec2{uniform(rng, 0, 1), uniform(rng, 0, 1)};
      p.centers.fixed.push_back({f, -1});
    }
    p.centers.release_lambda = uniform(rng, 0, 1) < 0.5 ? pack::kInfinity : uniform(rng, 0.0, 50.0);
  }
  if (uniform(rng, 0, 1) < 0.4) {
    // Outlier penalty on the scale of typical distances.
    const double scale = p.metric.kind() == pack::MetricKind::SquaredEuclidean ? 0.04 : 0.2;
    p.outlier_lambda = scale * uniform(rng, 0.5, 2.0);
  }
  if (uniform(rng, 0, 1) < 0.7) {
    double total = 0.0;
    for (const pack::Point& pt : p.points) total += pt.capacity_coeff * pt.coverage;
    const double mean = total / k;
    const double width = uniform(rng, 0.2, 0.8);
    p.capacity = pack::CapacityWindow{p.outlier_lambda ? 0.0 : mean * (1 - width), mean * (1 + width)};
  }
  return p;
}

std::vector<pack::Point> uniform_points(Engine& rng, std::size_t n) {
  std::vector<pack::Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pack::Point p;
    p.id = static_cast<std::int64_t>(i) + 1;
    p.pos = {uniform(rng, 0, 1), uniform(rng, 0, 1)};
    p.weight = 1.0;
    p.capacity_coeff = 1.0;
    pts.push_back(p);
  }
  return pts;
}

std::vector<pack::Point> blobs(Engine& rng, std::size_t clusters, std::size_t per_cluster,
                               double spread) {
  std::normal_distribution<double> gauss(0.0, spread);
  std::vector<pack::Point> pts;
  for (std::size_t c = 0; c < clusters; ++c) {
    const pack::Vec2 m{static_cast<double>(c % 4), static_cast<double>(c / 4)};
    for (std::size_t i = 0; i < per_cluster; ++i) {
      pack::Point p;
      p.id = static_cast<std::int64_t>(pts.size()) + 1;
      p.pos = {m.x + gauss(rng), m.y + gauss(rng)};
      p.weight = 1.0;
      p.capacity_coeff = 1.0;
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace testing_support
