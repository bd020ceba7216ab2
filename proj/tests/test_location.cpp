#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pack/error.hpp"
#include "pack/location.hpp"
#include "pack/problem.hpp"

using namespace pack;

namespace {

Problem line_problem(MetricSpec metric, const std::vector<double>& xs) {
  Problem p;
  p.metric = metric;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Point q;
    q.id = static_cast<std::int64_t>(i) + 1;
    q.pos = {xs[i], 0};
    q.weight = 1;
    q.capacity_coeff = 1;
    p.points.push_back(q);
  }
  return p;
}

double weighted_sum(const MetricSpec& m, const std::vector<Vec2>& pts,
                    const std::vector<double>& w, Vec2 c) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += w[i] * coordinate_distance(m, pts[i], c);
  return s;
}

}  // namespace

TEST_CASE("squared Euclidean center is the weighted mean") {
  const std::vector<Vec2> pts{{0, 0}, {2, 0}};
  const std::vector<double> w{1, 3};
  const GeometricMedian g = update_center_continuous(MetricSpec::squared_euclidean(), pts, w);
  CHECK(g.center.x == 1.5);
  CHECK(g.center.y == 0.0);
}

TEST_CASE("equilateral triangle: geometric median is the centroid") {
  const double h = std::sqrt(3.0) / 2.0;
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0.5, h}};
  const std::vector<double> w{1, 1, 1};
  const GeometricMedian g = update_center_continuous(MetricSpec::euclidean(), pts, w);
  CHECK(std::abs(g.center.x - 0.5) < 1e-6);
  CHECK(std::abs(g.center.y - h / 3.0) < 1e-6);
  CHECK_FALSE(g.hit_iteration_cap);
}

TEST_CASE("collinear points: geometric median is the middle point") {
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {10, 0}};
  const std::vector<double> w{1, 1, 1};
  const GeometricMedian g = geometric_median(pts, w);
  CHECK(std::abs(g.center.x - 1.0) < 1e-6);
  CHECK(std::abs(g.center.y) < 1e-6);
}

TEST_CASE("a dominant data point is the geometric median") {
  // Mass 5 outweighs the other three combined, so the optimum is that point.
  const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0, 1}, {-1, -1}};
  const std::vector<double> w{5, 1, 1, 1};
  const GeometricMedian g = geometric_median(pts, w);
  CHECK(std::abs(g.center.x) < 1e-9);
  CHECK(std::abs(g.center.y) < 1e-9);
}

TEST_CASE("Weiszfeld matches the grid oracle on random weighted instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<Vec2> pts;
    std::vector<double> w;
    for (int i = 0; i < 5; ++i) {
      pts.push_back({u(rng), u(rng)});
      w.push_back(0.1 + u(rng));
    }
    const Vec2 g = geometric_median(pts, w).center;
    const Vec2 ref = oracle::grid_geometric_median(pts, w);
    CHECK(norm(g - ref) < 1e-4);
  }
}

TEST_CASE("Manhattan center is the coordinatewise weighted (lower) median") {
  const std::vector<Vec2> pts{{0, 5}, {1, 1}, {4, 0}, {9, 2}};
  const std::vector<double> w{1, 1, 1, 1};
  const Vec2 c = update_center_continuous(MetricSpec::manhattan(), pts, w).center;
  // Cumulative mass hits one half at the second value: lower median.
  CHECK(c.x == 1.0);
  CHECK(c.y == 1.0);
  const std::vector<double> heavy{1, 1, 3, 1};
  const Vec2 d = weighted_median(pts, heavy);
  CHECK(d.x == 4.0);
  CHECK(d.y == 0.0);
}

TEST_CASE("mean and median are scale-equivariant") {
  const std::vector<Vec2> pts{{0.3, 1.1}, {2.5, -0.4}, {1.7, 0.9}, {-0.8, 0.2}};
  const std::vector<double> w{1, 2, 0.5, 1.5};
  std::vector<Vec2> scaled;
  for (const Vec2& p : pts) scaled.push_back(p * 4.0);
  const Vec2 m = weighted_mean(pts, w), ms = weighted_mean(scaled, w);
  CHECK(ms.x == doctest::Approx(4 * m.x));
  CHECK(ms.y == doctest::Approx(4 * m.y));
  const Vec2 md = weighted_median(pts, w), mds = weighted_median(scaled, w);
  CHECK(mds.x == 4 * md.x);
  CHECK(mds.y == 4 * md.y);
}

TEST_CASE("center updates never increase the cluster loss") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (const MetricSpec& m : {MetricSpec::squared_euclidean(), MetricSpec::euclidean(),
                              MetricSpec::manhattan()}) {
    for (int t = 0; t < 20; ++t) {
      std::vector<Vec2> pts;
      std::vector<double> w;
      for (int i = 0; i < 9; ++i) {
        pts.push_back({u(rng), u(rng)});
        w.push_back(u(rng));
      }
      const Vec2 c = update_center_continuous(m, pts, w).center;
      const double best = weighted_sum(m, pts, w, c);
      for (int probe = 0; probe < 20; ++probe) {
        CHECK(best <= weighted_sum(m, pts, w, {u(rng), u(rng)}) + 1e-9);
      }
    }
  }
}

TEST_CASE("empty cluster is reported") {
  const std::vector<Vec2> pts{{0, 0}};
  const std::vector<double> w{0};
  CHECK_THROWS_AS(update_center_continuous(MetricSpec::euclidean(), pts, w), Error);
}

TEST_CASE("discrete center: argmin over candidates") {
  Problem p = line_problem(MetricSpec::euclidean(), {0, 1, 5});
  p.centers.placement = Placement::Discrete;
  p.centers.candidates = {{0, 0}, {1, 0}, {5, 0}};
  const std::vector<double> m{1, 1, 1};
  CHECK(update_center_discrete(p, m) == 1);
  CHECK(cluster_loss(p, m, p.site(0)) == 6.0);
  CHECK(cluster_loss(p, m, p.site(1)) == 5.0);
  CHECK(cluster_loss(p, m, p.site(2)) == 9.0);

  const std::vector<double> only_last{0, 0, 2};
  CHECK(update_center_discrete(p, only_last) == 2);
}

TEST_CASE("discrete center with a matrix metric picks a zero column") {
  Matrix d(2, 3, 4.0);
  d(0, 2) = 0;
  d(1, 2) = 0;
  Problem p;
  p.metric = MetricSpec::matrix(d);
  p.centers.placement = Placement::Discrete;
  for (int i = 0; i < 2; ++i) {
    Point q;
    q.id = i + 1;
    q.has_coords = false;
    q.weight = 1;
    p.points.push_back(q);
  }
  const std::vector<double> m{1, 3};
  CHECK(update_center_discrete(p, m) == 2);
}

TEST_CASE("discrete ties go to the lowest site") {
  Problem p = line_problem(MetricSpec::euclidean(), {0, 2});
  p.centers.placement = Placement::Discrete;
  p.centers.candidates = {{3, 0}, {1, 0}, {1, 0.0}};
  const std::vector<double> m{1, 1};
  // Sites 1 and 2 coincide; site 0 costs 4.
  CHECK(update_center_discrete(p, m) == 1);
}

TEST_CASE("release rule: strict gain over lambda_f") {
  Problem p = line_problem(MetricSpec::euclidean(), {10});
  p.centers.fixed = {{{0, 0}, -1}};
  const std::vector<double> m{1};
  const Location home{{0, 0}, -1};

  p.centers.release_lambda = 5;
  ReleaseDecision d = decide_release(p, 0, m, false, home);
  CHECK(d.released);
  CHECK(d.gain == doctest::Approx(10.0));
  CHECK(norm(d.location.pos - Vec2{10, 0}) < 1e-9);

  p.centers.release_lambda = 15;
  d = decide_release(p, 0, m, false, home);
  CHECK_FALSE(d.released);
  CHECK(d.location == home);

  // Gain exactly equal to lambda_f keeps the center.
  p.metric = MetricSpec::manhattan();
  p.centers.release_lambda = 10;
  d = decide_release(p, 0, m, false, home);
  CHECK(d.gain == 10.0);
  CHECK_FALSE(d.released);
}

TEST_CASE("released centers reattach when the gain falls below lambda_f") {
  Problem p = line_problem(MetricSpec::euclidean(), {1});
  p.centers.fixed = {{{0, 0}, -1}};
  p.centers.release_lambda = 5;
  const std::vector<double> m{1};
  const ReleaseDecision d = decide_release(p, 0, m, true, Location{{1, 0}, -1});
  CHECK_FALSE(d.released);
  CHECK(d.location.pos == Vec2{0, 0});
}
