#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pack/allocation.hpp"
#include "pack/problem.hpp"

namespace pack {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Seed of restart `index` derived from a master seed (splitmix64 of the
// counter), so any execution order yields the same restart set.
std::uint64_t restart_seed(std::uint64_t master, std::uint64_t index);

struct SolverConfig {
  int restarts = 10;
  std::uint64_t rng_seed = 0;
  int max_iterations = 100;
  // Stop when the objective decreases by less than this fraction.
  double tolerance = 1e-9;
  Seconds time_budget = Seconds(kInfinity);  // per allocation call
  long node_limit = 0;                       // per allocation call; 0: none
  int threads = 0;                           // 0: hardware concurrency
};

// Objective after every allocation and every location step, plus the
// center iterates, for inspecting a descent.
struct DescentTrace {
  std::vector<double> objectives;
  std::vector<std::vector<Location>> centers;  // initial centers first
  std::vector<Assignment> assignments;
};

// Weighted k-means++ seeding.  Fixed centers take slots 0..m-1; each further
// center is a data point drawn with probability proportional to
// w'_i * D(x_i)^2, where D is the distance to the nearest chosen center (for
// the squared Euclidean metric D^2 is the metric value itself).  In discrete
// placement the drawn point snaps to its nearest candidate site and draws
// landing on an occupied site are repeated.
std::vector<Location> kmeanspp_init(const Problem& problem, Rng& rng);

// Block coordinate descent from `initial` until the centers stop moving, the
// relative decrease falls below the tolerance, or max_iterations is reached.
// The returned assignment is an allocation for the returned centers.
Solution descend(const Problem& problem, std::vector<Location> initial, const SolverConfig& config,
                 DescentTrace* trace = nullptr);

// Best of `config.restarts` seeded descents (lowest restart index on ties).
Solution solve(const Problem& problem, const SolverConfig& config);

}  // namespace pack
