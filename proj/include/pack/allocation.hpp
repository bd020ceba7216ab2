#pragma once

#include <chrono>
#include <span>

#include "pack/problem.hpp"

namespace pack {

struct AllocationResult {
  Assignment assignment;
  // Distance plus outlier terms of the objective for this assignment.
  double cost = 0.0;
  // Lower bound on the optimal cost (equals `cost` when proven optimal).
  double bound = 0.0;
  bool proven_optimal = true;
  bool budget_exhausted = false;
  // Uniform capacity coefficients let the LP relaxation be solved once with
  // rounded limits; its optimum is then integral.
  bool integral_fast_path = false;
  long nodes = 0;
  bool outlier_absorbed_coverage = false;

  double gap() const { return cost - bound; }
};

using Seconds = std::chrono::duration<double>;

// Nearest-center assignment: each point's Q_i slots go to its Q_i nearest
// centers (lowest index on ties); a slot goes to the outlier column when the
// nearest available center is farther than lambda_o.  Ignores capacity.
AllocationResult allocate_uncapacitated(const Problem& problem, std::span<const Location> centers);

// Exact LP optimum of the fractional allocation under the capacity window,
// solved as a min-cost flow on z_ij = a_i y_ij.  Throws Infeasible.
AllocationResult allocate_fractional(const Problem& problem, std::span<const Location> centers);

struct HardLimits {
  Seconds time_budget = Seconds(kInfinity);
  // Branch-and-bound node budget (0: unlimited).  Unlike the time budget it
  // keeps results reproducible.
  long node_limit = 0;
  // Known feasible binary assignment used as the starting incumbent.
  const Assignment* warm_start = nullptr;
};

// Optimal binary allocation by best-first branch-and-bound on the LP
// relaxation, seeded with a rounded-and-repaired LP incumbent.  If a budget
// runs out the best incumbent is returned with `proven_optimal == false`;
// without an incumbent NoIncumbentWithinBudget is thrown.  Throws Infeasible
// when no binary allocation exists.
AllocationResult allocate_hard(const Problem& problem, std::span<const Location> centers,
                               const HardLimits& limits);
AllocationResult allocate_hard(const Problem& problem, std::span<const Location> centers,
                               Seconds time_budget = Seconds(kInfinity));

// Dispatches on the problem's capacity window and membership mode.
AllocationResult allocate(const Problem& problem, std::span<const Location> centers,
                          const HardLimits& limits = {});

}  // namespace pack
