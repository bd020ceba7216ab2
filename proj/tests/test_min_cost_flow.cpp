#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pack/min_cost_flow.hpp"

using pack::MinCostFlow;

TEST_CASE("two-path network picks the cheap path up to its capacity") {
  MinCostFlow f(4);
  const int a = f.add_arc(0, 1, 0, 3, 1);
  const int b = f.add_arc(1, 3, 0, 3, 1);
  const int c = f.add_arc(0, 2, 0, 10, 2);
  const int d = f.add_arc(2, 3, 0, 10, 2);
  f.set_supply(0, 5);
  f.set_supply(3, -5);
  REQUIRE(f.solve() == MinCostFlow::Status::Optimal);
  CHECK(f.flow(a) == 3.0);
  CHECK(f.flow(b) == 3.0);
  CHECK(f.flow(c) == 2.0);
  CHECK(f.flow(d) == 2.0);
  CHECK(f.total_cost() == 3 * 2 + 2 * 4);
}

TEST_CASE("lower bounds force flow onto expensive arcs") {
  MinCostFlow f(2);
  const int cheap = f.add_arc(0, 1, 0, 10, 1);
  const int dear = f.add_arc(0, 1, 4, 10, 5);
  f.set_supply(0, 6);
  f.set_supply(1, -6);
  REQUIRE(f.solve() == MinCostFlow::Status::Optimal);
  CHECK(f.flow(dear) == 4.0);
  CHECK(f.flow(cheap) == 2.0);
}

TEST_CASE("infeasible supplies and bounds are detected") {
  MinCostFlow f(2);
  f.add_arc(0, 1, 0, 2, 1);
  f.set_supply(0, 3);
  f.set_supply(1, -3);
  CHECK(f.solve() == MinCostFlow::Status::Infeasible);

  MinCostFlow g(2);
  g.add_arc(0, 1, 0, 5, 1);
  g.set_supply(0, 3);
  g.set_supply(1, -2);
  CHECK(g.solve() == MinCostFlow::Status::Infeasible);

  MinCostFlow h(2);
  h.add_arc(0, 1, 3, 2, 1);
  CHECK(h.solve() == MinCostFlow::Status::Infeasible);
}

TEST_CASE("random transportation problems match the LP oracle; basic arcs have zero reduced cost") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int s = 2 + trial % 3, t = 2 + (trial / 3) % 3;
    std::vector<double> supply(s), demand(t, 0.0);
    double total = 0.0;
    for (double& v : supply) total += v = 1.0 + std::floor(5 * u(rng));
    // Spread the total over the sinks.
    double left = total;
    for (int j = 0; j + 1 < t; ++j) left -= demand[j] = std::floor(left * u(rng));
    demand[t - 1] = left;

    MinCostFlow f(s + t);
    oracle::LinearProgram lp;
    std::vector<std::vector<double>> cap(s, std::vector<double>(t));
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < t; ++j) {
        const double c = std::floor(10 * u(rng));
        cap[i][j] = u(rng) < 0.3 ? std::floor(3 * u(rng)) : total;
        f.add_arc(i, s + j, 0, cap[i][j], c);
        lp.c.push_back(c);
      }
    }
    for (int i = 0; i < s; ++i) f.set_supply(i, supply[i]);
    for (int j = 0; j < t; ++j) f.set_supply(s + j, -demand[j]);
    const int vars = s * t;
    for (int i = 0; i < s; ++i) {
      std::vector<double> row(vars, 0.0);
      for (int j = 0; j < t; ++j) row[i * t + j] = 1;
      lp.add_row(row, '=', supply[i]);
    }
    for (int j = 0; j < t; ++j) {
      std::vector<double> row(vars, 0.0);
      for (int i = 0; i < s; ++i) row[i * t + j] = 1;
      lp.add_row(row, '=', demand[j]);
    }
    for (int v = 0; v < vars; ++v) {
      std::vector<double> row(vars, 0.0);
      row[v] = 1;
      lp.add_row(row, '<', cap[v / t][v % t]);
    }
    const auto ref = oracle::solve_lp(lp);
    const auto status = f.solve();
    CHECK((status == MinCostFlow::Status::Optimal) == ref.has_value());
    if (!ref) continue;
    CHECK(f.total_cost() == doctest::Approx(ref->value).epsilon(1e-12));
    for (int a = 0; a < f.num_arcs(); ++a) {
      if (f.is_basic(a)) CHECK(std::abs(f.reduced_cost(a)) <= 1e-9);
      // Optimality: arcs that could still carry more flow price nonnegative.
      if (f.flow(a) <= 0.0 && cap[a / t][a % t] > 0.0) CHECK(f.reduced_cost(a) >= -1e-9);
    }
  }
}
