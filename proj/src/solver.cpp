#include "pack/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <set>
#include <thread>

#include "pack/error.hpp"
#include "pack/location.hpp"

namespace pack {

std::uint64_t restart_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Squared seeding distance of point i to a center.
double seeding_distance(const Problem& problem, std::size_t i, const Location& c) {
  const double d = distance(problem.metric, i, problem.points[i].pos, c);
  return problem.metric.kind() == MetricKind::SquaredEuclidean ? d : d * d;
}

// Index drawn with probability proportional to `weights`; -1 if all zero.
int draw(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return -1;
  const double u = uniform01(rng) * total;
  double cumulative = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last = static_cast<int>(i);
    if (u < cumulative) return last;
  }
  return last;
}

std::size_t nearest_site(const Problem& problem, std::size_t i) {
  std::size_t best = 0;
  double best_d = kInfinity;
  for (std::size_t h = 0; h < problem.site_count(); ++h) {
    const double d = distance(problem.metric, i, problem.points[i].pos, problem.site(h));
    if (d < best_d) {
      best_d = d;
      best = h;
    }
  }
  return best;
}

double data_diameter(const Problem& problem) {
  if (problem.metric.kind() == MetricKind::Matrix) return 0.0;
  double min_x = kInfinity, max_x = -kInfinity, min_y = kInfinity, max_y = -kInfinity;
  for (const Point& p : problem.points) {
    min_x = std::min(min_x, p.pos.x);
    max_x = std::max(max_x, p.pos.x);
    min_y = std::min(min_y, p.pos.y);
    max_y = std::max(max_y, p.pos.y);
  }
  return std::hypot(max_x - min_x, max_y - min_y);
}

bool same_centers(const std::vector<Location>& a, const std::vector<Location>& b, double tol) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].site != b[j].site) return false;
    if (norm(a[j].pos - b[j].pos) > tol) return false;
  }
  return true;
}

}  // namespace

std::vector<Location> kmeanspp_init(const Problem& problem, Rng& rng) {
  const std::size_t n = problem.n();
  const bool discrete = problem.centers.placement == Placement::Discrete;
  std::vector<Location> centers(problem.centers.fixed.begin(), problem.centers.fixed.end());
  std::set<std::ptrdiff_t> used_sites;
  for (const Location& c : centers) used_sites.insert(c.site);

  std::vector<double> nearest(n, kInfinity);
  auto absorb = [&](const Location& c) {
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], seeding_distance(problem, i, c));
  };
  for (const Location& c : centers) absorb(c);

  while (centers.size() < static_cast<std::size_t>(problem.k())) {
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = problem.points[i].effective_weight();
      weights[i] = std::isinf(nearest[i]) ? w : w * nearest[i];
    }
    std::optional<Location> chosen;
    for (;;) {
      const int i = draw(weights, rng);
      if (i < 0) break;
      if (!discrete) {
        chosen = Location{problem.points[i].pos, -1};
        break;
      }
      const std::size_t h = nearest_site(problem, static_cast<std::size_t>(i));
      if (!used_sites.count(static_cast<std::ptrdiff_t>(h))) {
        chosen = problem.site(h);
        break;
      }
      weights[i] = 0.0;  // redraw
    }
    if (!chosen) {
      // Every remaining point already coincides with a center.
      if (!discrete) {
        chosen = Location{problem.points[rng() % n].pos, -1};
      } else {
        std::vector<std::size_t> free_sites;
        for (std::size_t h = 0; h < problem.site_count(); ++h) {
          if (!used_sites.count(static_cast<std::ptrdiff_t>(h))) free_sites.push_back(h);
        }
        if (free_sites.empty()) {
          throw Error(ErrorCode::NotEnoughDistinctSites,
                      "fewer than k distinct candidate sites available");
        }
        chosen = problem.site(free_sites[rng() % free_sites.size()]);
      }
    }
    used_sites.insert(chosen->site);
    centers.push_back(*chosen);
    absorb(*chosen);
  }
  return centers;
}

namespace {

struct Iterate {
  std::vector<Location> centers;
  std::vector<bool> released;

  std::size_t released_count() const {
    return static_cast<std::size_t>(std::count(released.begin(), released.end(), true));
  }
};

std::vector<std::size_t> released_indices(const std::vector<bool>& released) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < released.size(); ++l) {
    if (released[l]) out.push_back(l);
  }
  return out;
}

// Location step.  Returns the new iterate; counts re-seeded centers.
Iterate relocate(const Problem& problem, const Iterate& cur, const Assignment& y,
                 const Matrix& dist, SolveDiagnostics& diag) {
  const std::size_t n = problem.n();
  const int k = problem.k();
  const std::size_t m = problem.m();
  Iterate next = cur;
  std::vector<int> empty;

  std::vector<double> masses(n);
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) masses[i] = problem.points[i].effective_weight() * y.at(i, j);

    if (static_cast<std::size_t>(j) < m) {
      if (std::isinf(problem.centers.release_lambda)) continue;  // never moves
      const ReleaseDecision rd = decide_release(problem, static_cast<std::size_t>(j), masses,
                                                cur.released[j], cur.centers[j],
                                                &diag.weiszfeld_cap_hits);
      next.released[j] = rd.released;
      next.centers[j] = rd.location;
      continue;
    }
    try {
      const Location candidate = optimal_location(problem, masses, &diag.weiszfeld_cap_hits);
      if (cluster_loss(problem, masses, candidate) <= cluster_loss(problem, masses, cur.centers[j])) {
        next.centers[j] = candidate;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyCluster) throw;
      empty.push_back(j);
    }
  }

  if (!empty.empty()) {
    // Re-seed each empty center at the worst-served point.
    std::vector<double> score(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double served = 0.0;
      double nearest = kInfinity;
      for (int j = 0; j < k; ++j) {
        served += y.at(i, j) * dist(i, j);
        nearest = std::min(nearest, dist(i, j));
      }
      served += y.outlier(i) * nearest;
      score[i] = problem.points[i].effective_weight() * served / problem.points[i].coverage;
    }
    std::set<std::ptrdiff_t> occupied;
    for (const Location& c : next.centers) occupied.insert(c.site);
    std::vector<bool> taken(n, false);
    for (int j : empty) {
      int best = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (best < 0 || score[i] > score[best]) best = static_cast<int>(i);
      }
      if (best < 0) break;
      taken[best] = true;
      if (problem.centers.placement == Placement::Discrete) {
        // Nearest unoccupied site to the chosen point.
        std::ptrdiff_t site = -1;
        double best_d = kInfinity;
        for (std::size_t h = 0; h < problem.site_count(); ++h) {
          if (occupied.count(static_cast<std::ptrdiff_t>(h))) continue;
          const double d = distance(problem.metric, best, problem.points[best].pos, problem.site(h));
          if (d < best_d) {
            best_d = d;
            site = static_cast<std::ptrdiff_t>(h);
          }
        }
        if (site < 0) continue;
        occupied.erase(next.centers[j].site);
        occupied.insert(site);
        next.centers[j] = problem.site(static_cast<std::size_t>(site));
      } else {
        next.centers[j] = Location{problem.points[best].pos, -1};
      }
      ++diag.reseeded_centers;
    }
  }
  return next;
}

}  // namespace

Solution descend(const Problem& problem, std::vector<Location> initial, const SolverConfig& config,
                 DescentTrace* trace) {
  if (initial.size() != static_cast<std::size_t>(problem.k())) {
    throw Error(ErrorCode::ShapeMismatch, "initial centers must number k");
  }
  const std::size_t m = problem.m();
  Iterate cur{std::move(initial), std::vector<bool>(m, false)};
  for (std::size_t l = 0; l < m; ++l) cur.released[l] = !(cur.centers[l] == problem.centers.fixed[l]);

  const double move_tol = 1e-9 * data_diameter(problem);
  SolveDiagnostics diag;
  if (trace) trace->centers.push_back(cur.centers);

  Assignment y;
  std::vector<Location> alloc_centers;
  AllocationResult last_alloc;
  double previous = kInfinity;
  ObjectiveBreakdown objective;
  bool any_exhausted = false;
  int it = 0;
  while (it < config.max_iterations) {
    ++it;
    HardLimits limits;
    limits.time_budget = config.time_budget;
    limits.node_limit = config.node_limit;
    // The previous assignment stays feasible, so a budget-limited search
    // never does worse than it.
    if (it > 1) limits.warm_start = &y;
    last_alloc = allocate(problem, cur.centers, limits);
    alloc_centers = cur.centers;
    any_exhausted = any_exhausted || last_alloc.budget_exhausted;
    y = last_alloc.assignment;
    if (trace) {
      trace->objectives.push_back(
          evaluate_objective(problem, cur.centers, y, cur.released_count()).total);
      trace->assignments.push_back(y);
    }

    const Matrix dist = distance_table(problem, cur.centers);
    Iterate next = relocate(problem, cur, y, dist, diag);
    objective = evaluate_objective(problem, next.centers, y, next.released_count());
    if (trace) {
      trace->objectives.push_back(objective.total);
      trace->centers.push_back(next.centers);
    }

    const bool unchanged = same_centers(cur.centers, next.centers, move_tol) &&
                           cur.released == next.released;
    cur = std::move(next);
    if (unchanged) break;
    if (std::isfinite(previous) &&
        previous - objective.total <= config.tolerance * std::abs(previous)) {
      break;
    }
    previous = objective.total;
  }

  // Pair the final centers with their own allocation; it cannot cost more
  // than the assignment made for the previous centers.
  if (!(cur.centers == alloc_centers)) {
    HardLimits limits;
    limits.time_budget = config.time_budget;
    limits.node_limit = config.node_limit;
    limits.warm_start = &y;
    AllocationResult final_alloc = allocate(problem, cur.centers, limits);
    const ObjectiveBreakdown final_objective =
        evaluate_objective(problem, cur.centers, final_alloc.assignment, cur.released_count());
    any_exhausted = any_exhausted || final_alloc.budget_exhausted;
    if (final_objective.total <= objective.total) {
      last_alloc = std::move(final_alloc);
      y = last_alloc.assignment;
      objective = final_objective;
      if (trace) {
        trace->objectives.push_back(objective.total);
        trace->assignments.push_back(y);
      }
    }
  }

  diag.iterations = it;
  diag.allocation_proven_optimal = last_alloc.proven_optimal;
  diag.allocation_gap = last_alloc.gap();
  diag.budget_exhausted = any_exhausted;
  diag.integral_fast_path = last_alloc.integral_fast_path;
  diag.outlier_absorbed_coverage = last_alloc.outlier_absorbed_coverage;
  diag.restarts = 1;

  Solution s;
  s.centers = std::move(cur.centers);
  s.assignment = std::move(y);
  s.released = released_indices(cur.released);
  s.objective = objective;
  s.diagnostics = diag;
  return s;
}

Solution solve(const Problem& problem, const SolverConfig& config) {
  if (config.restarts < 1) throw Error(ErrorCode::InvalidProblem, "restarts must be >= 1");
  const int restarts = config.restarts;
  std::vector<std::optional<Solution>> results(restarts);
  std::vector<std::exception_ptr> errors(restarts);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < restarts; r = next++) {
      try {
        Rng rng(restart_seed(config.rng_seed, static_cast<std::uint64_t>(r)));
        std::vector<Location> init = kmeanspp_init(problem, rng);
        results[r] = descend(problem, std::move(init), config);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int best = -1;
  for (int r = 0; r < restarts; ++r) {
    if (!results[r]) continue;
    if (best < 0 || results[r]->objective.total < results[best]->objective.total) best = r;
  }
  if (best < 0) {
    try {
      std::rethrow_exception(errors.front());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Infeasible) {
        throw Error(ErrorCode::AllRestartsInfeasible, e.what());
      }
      throw;
    }
  }
  Solution s = std::move(*results[best]);
  s.diagnostics.restarts = restarts;
  s.diagnostics.best_restart = best;
  return s;
}

}  // namespace pack
