#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "instances.hpp"
#include "oracles.hpp"
#include "pack/allocation.hpp"
#include "pack/error.hpp"

using namespace pack;

namespace {

Point pt(std::int64_t id, Vec2 pos, double w = 1.0, double a = 1.0) {
  Point p;
  p.id = id;
  p.pos = pos;
  p.weight = w;
  p.capacity_coeff = a;
  return p;
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

// Points A and B with d(A) = 0/5 and d(B) = 1/3 to the two centers.  These
// distances violate the triangle inequality, so they come as a matrix.
struct AB {
  Problem problem;
  std::vector<Location> centers{{{}, 0}, {{}, 1}};

  explicit AB(Membership m) {
    Matrix d(2, 2);
    d(0, 0) = 0;
    d(0, 1) = 5;
    d(1, 0) = 1;
    d(1, 1) = 3;
    problem.metric = MetricSpec::matrix(d);
    problem.centers.placement = Placement::Discrete;
    problem.points = {pt(1, {}, 1, 2), pt(2, {}, 1, 2)};
    for (Point& q : problem.points) q.has_coords = false;
    problem.centers.k = 2;
    problem.membership = m;
    problem.capacity = CapacityWindow{1, 3};
  }
};

}  // namespace

TEST_CASE("outlier rule: strictly farther than lambda_o goes to the outlier column") {
  Problem p;
  p.metric = MetricSpec::euclidean();
  p.points = {pt(1, {0.3, 0}), pt(2, {0.2, 0})};
  p.outlier_lambda = 0.2;
  const std::vector<Location> c{{{0, 0}, -1}};
  const AllocationResult r = allocate_uncapacitated(p, c);
  CHECK(r.assignment.outlier(0) == 1.0);
  CHECK(r.assignment.at(0, 0) == 0.0);
  CHECK(r.assignment.at(1, 0) == 1.0);
  CHECK(r.assignment.outlier(1) == 0.0);
  CHECK(r.cost == doctest::Approx(0.2 + 0.2));
}

TEST_CASE("coverage 2 goes to the two nearest centers") {
  Problem p;
  p.metric = MetricSpec::euclidean();
  Point a = pt(1, {0, 0});
  a.coverage = 2;
  p.points = {a};
  p.centers.k = 3;
  const std::vector<Location> c{{{5, 0}, -1}, {{0, 1}, -1}, {{0, 2}, -1}};
  const AllocationResult r = allocate_uncapacitated(p, c);
  CHECK(r.assignment.at(0, 0) == 0.0);
  CHECK(r.assignment.at(0, 1) == 1.0);
  CHECK(r.assignment.at(0, 2) == 1.0);
  CHECK(r.cost == 3.0);
}

TEST_CASE("ties go to the lowest center index") {
  Problem p;
  p.points = {pt(1, {0, 0})};
  p.centers.k = 2;
  const std::vector<Location> c{{{1, 0}, -1}, {{-1, 0}, -1}};
  CHECK(allocate_uncapacitated(p, c).assignment.at(0, 0) == 1.0);
}

TEST_CASE("coverage above k is rejected") {
  Problem p;
  Point a = pt(1, {0, 0});
  a.coverage = 3;
  p.points = {a};
  p.centers.k = 2;
  const std::vector<Location> c{{{1, 0}, -1}, {{-1, 0}, -1}};
  CHECK(error_of([&] { allocate_uncapacitated(p, c); }) == ErrorCode::QExceedsK);
}

TEST_CASE("A/B instance: fractional optimum 2.0") {
  AB ab(Membership::Fractional);
  const AllocationResult r = allocate_fractional(ab.problem, ab.centers);
  CHECK(r.cost == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.assignment.at(0, 0) == doctest::Approx(1.0));
  CHECK(r.assignment.at(1, 0) == doctest::Approx(0.5));
  CHECK(r.assignment.at(1, 1) == doctest::Approx(0.5));
  CHECK(check_assignment(ab.problem, r.assignment, 1e-9).empty());
  const auto ref = oracle::fractional_allocation_value(ab.problem, ab.centers);
  REQUIRE(ref);
  CHECK(*ref == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("A/B instance: hard optimum 3.0") {
  AB ab(Membership::Hard);
  const AllocationResult r = allocate_hard(ab.problem, ab.centers);
  CHECK(r.cost == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.proven_optimal);
  CHECK(r.assignment.at(0, 0) == 1.0);
  CHECK(r.assignment.at(1, 1) == 1.0);
  CHECK(check_assignment(ab.problem, r.assignment, 0).empty());
  CHECK(*oracle::brute_force_hard_value(ab.problem, ab.centers) == doctest::Approx(3.0));
}

TEST_CASE("single center below total demand is infeasible without outliers") {
  Problem p;
  p.points = {pt(1, {0, 0}, 1, 2), pt(2, {1, 0}, 1, 2)};
  p.membership = Membership::Fractional;
  p.capacity = CapacityWindow{0, 3};
  const std::vector<Location> c{{{0, 0}, -1}};
  CHECK(error_of([&] { allocate_fractional(p, c); }) == ErrorCode::Infeasible);
  p.membership = Membership::Hard;
  CHECK(error_of([&] { allocate_hard(p, c); }) == ErrorCode::Infeasible);
  // With an outlier column the excess can be dropped.
  p.outlier_lambda = 10.0;
  p.membership = Membership::Fractional;
  const AllocationResult r = allocate_fractional(p, c);
  CHECK(r.assignment.outlier(1) == doctest::Approx(0.5));
}

TEST_CASE("equal windows that cannot be tiled are infeasible in hard mode") {
  // Loads 3 + 3 + 2 = 8 cannot split into 4 + 4.
  Problem p;
  p.points = {pt(1, {0, 0}, 1, 3), pt(2, {1, 0}, 1, 3), pt(3, {2, 0}, 1, 2)};
  p.centers.k = 2;
  p.capacity = CapacityWindow{4, 4};
  const std::vector<Location> c{{{0, 0}, -1}, {{2, 0}, -1}};
  CHECK(error_of([&] { allocate_hard(p, c); }) == ErrorCode::Infeasible);
  p.membership = Membership::Fractional;
  CHECK_NOTHROW(allocate_fractional(p, c));
}

TEST_CASE("a window containing every load reproduces the nearest-center assignment") {
  testing_support::Engine rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Problem p;
    p.metric = MetricSpec::euclidean();
    p.centers.k = 3;
    for (int i = 0; i < 12; ++i) {
      p.points.push_back(pt(i + 1, {testing_support::uniform(rng, 0, 1), testing_support::uniform(rng, 0, 1)},
                            testing_support::uniform(rng, 0.5, 2), testing_support::uniform_int(rng, 1, 4)));
    }
    if (trial % 2) p.outlier_lambda = 0.3;
    std::vector<Location> c;
    for (int j = 0; j < 3; ++j) c.push_back({{testing_support::uniform(rng, 0, 1), testing_support::uniform(rng, 0, 1)}, -1});
    const AllocationResult un = allocate_uncapacitated(p, c);
    p.capacity = CapacityWindow{0, 1000};
    CHECK(allocate_hard(p, c).assignment == un.assignment);
    p.membership = Membership::Fractional;
    const AllocationResult fr = allocate_fractional(p, c);
    CHECK(fr.cost == doctest::Approx(un.cost).epsilon(1e-12));
    for (std::size_t i = 0; i < p.n(); ++i) {
      for (int j = 0; j < 3; ++j) CHECK(fr.assignment.at(i, j) == doctest::Approx(un.assignment.at(i, j)));
    }
  }
}

TEST_CASE("small random instances agree with the oracles") {
  testing_support::Engine rng(1234);
  int feasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto hc = testing_support::small_allocation_case(rng, Membership::Hard);
    const auto brute = oracle::brute_force_hard_value(hc.problem, hc.centers);
    if (brute) {
      ++feasible;
      const AllocationResult r = allocate_hard(hc.problem, hc.centers);
      CHECK(r.cost == doctest::Approx(*brute).epsilon(1e-9));
      CHECK(check_assignment(hc.problem, r.assignment, 0).empty());
    } else {
      CHECK(error_of([&] { allocate_hard(hc.problem, hc.centers); }) == ErrorCode::Infeasible);
    }
    hc.problem.membership = Membership::Fractional;
    const auto lp = oracle::fractional_allocation_value(hc.problem, hc.centers);
    if (lp) {
      const AllocationResult r = allocate_fractional(hc.problem, hc.centers);
      CHECK(r.cost == doctest::Approx(*lp).epsilon(1e-9));
      CHECK(check_assignment(hc.problem, r.assignment, 1e-6).empty());
      if (brute) CHECK(r.cost <= *brute + 1e-9);
    } else {
      CHECK(error_of([&] { allocate_fractional(hc.problem, hc.centers); }) == ErrorCode::Infeasible);
    }
  }
  CHECK(feasible > 20);
}

TEST_CASE("integral data is solved without branching") {
  Problem p;
  p.points = {pt(1, {0, 0}, 1, 2), pt(2, {1, 0}, 1, 2), pt(3, {2, 0}, 1, 2), pt(4, {3, 0}, 1, 2)};
  p.centers.k = 2;
  p.capacity = CapacityWindow{0, 5};
  const std::vector<Location> c{{{0, 0}, -1}, {{0.5, 0}, -1}};
  const AllocationResult r = allocate_hard(p, c);
  CHECK(r.integral_fast_path);
  CHECK(r.proven_optimal);
  CHECK(check_assignment(p, r.assignment, 0).empty());
  CHECK(r.cost == doctest::Approx(*oracle::brute_force_hard_value(p, c)));
}

TEST_CASE("node limit returns the incumbent with a gap report") {
  testing_support::Engine rng(99);
  Problem p = testing_support::medium_case(rng, Membership::Hard);
  p.outlier_lambda.reset();
  double total = 0.0;
  for (const Point& q : p.points) total += q.capacity_coeff;
  p.capacity = CapacityWindow{0.95 * total / p.k(), 1.05 * total / p.k()};
  std::vector<Location> c;
  for (int j = 0; j < p.k(); ++j) c.push_back({p.points[static_cast<std::size_t>(j) * 20].pos, -1});
  p.centers.placement = Placement::Continuous;
  p.centers.fixed.clear();
  HardLimits limits;
  limits.node_limit = 5;
  const AllocationResult r = allocate_hard(p, c, limits);
  CHECK(check_assignment(p, r.assignment, 0).empty());
  CHECK(r.bound <= r.cost + 1e-9);
  if (!r.proven_optimal) CHECK(r.budget_exhausted);
  // The same limit gives the same answer.
  CHECK(allocate_hard(p, c, limits).assignment == r.assignment);
  // Warm start is never worsened.
  limits.warm_start = &r.assignment;
  CHECK(allocate_hard(p, c, limits).cost <= r.cost + 1e-12);
}

TEST_CASE("dispatch follows the capacity window and membership") {
  AB ab(Membership::Fractional);
  CHECK(allocate(ab.problem, ab.centers).cost == doctest::Approx(2.0));
  ab.problem.membership = Membership::Hard;
  CHECK(allocate(ab.problem, ab.centers).cost == doctest::Approx(3.0));
  ab.problem.capacity.reset();
  CHECK(allocate(ab.problem, ab.centers).cost == doctest::Approx(1.0));
}
