#include "pack/location.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pack/error.hpp"

namespace pack {
namespace {

double total_mass(std::span<const double> masses) {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

[[noreturn]] void empty_cluster() {
  throw Error(ErrorCode::EmptyCluster, "no mass assigned to the center");
}

double lower_weighted_median(std::vector<std::pair<double, double>>& values, double total) {
  std::sort(values.begin(), values.end());
  double cumulative = 0.0;
  for (const auto& [v, m] : values) {
    cumulative += m;
    if (cumulative >= 0.5 * total) return v;
  }
  return values.back().first;
}

}  // namespace

Vec2 weighted_mean(std::span<const Vec2> points, std::span<const double> masses) {
  double sx = 0.0, sy = 0.0, sm = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sx += masses[i] * points[i].x;
    sy += masses[i] * points[i].y;
    sm += masses[i];
  }
  if (!(sm > 0.0)) empty_cluster();
  return {sx / sm, sy / sm};
}

Vec2 weighted_median(std::span<const Vec2> points, std::span<const double> masses) {
  std::vector<std::pair<double, double>> xs, ys;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (masses[i] <= 0.0) continue;
    xs.emplace_back(points[i].x, masses[i]);
    ys.emplace_back(points[i].y, masses[i]);
    total += masses[i];
  }
  if (!(total > 0.0)) empty_cluster();
  return {lower_weighted_median(xs, total), lower_weighted_median(ys, total)};
}

GeometricMedian geometric_median(std::span<const Vec2> points, std::span<const double> masses,
                                 int max_iterations) {
  // Merge coincident points so the Kuhn test sees the full mass at a site.
  std::vector<std::pair<Vec2, double>> sites;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (masses[i] > 0.0) sites.emplace_back(points[i], masses[i]);
  }
  if (sites.empty()) empty_cluster();
  std::sort(sites.begin(), sites.end(), [](const auto& a, const auto& b) {
    return a.first.x != b.first.x ? a.first.x < b.first.x : a.first.y < b.first.y;
  });
  std::vector<Vec2> x;
  std::vector<double> m;
  for (const auto& [p, w] : sites) {
    if (!x.empty() && x.back() == p) {
      m.back() += w;
    } else {
      x.push_back(p);
      m.push_back(w);
    }
  }
  GeometricMedian result;
  if (x.size() == 1) {
    result.center = x.front();
    return result;
  }

  double min_x = x.front().x, max_x = min_x, min_y = x.front().y, max_y = min_y;
  for (const Vec2& p : x) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double diameter = std::hypot(max_x - min_x, max_y - min_y);
  const double step_tol = 1e-9 * diameter;
  const double snap_tol = 1e-12 * diameter;

  // Resultant pull of all other sites on site `s`, and the matching
  // harmonic mass sum.  Returns true when site s is itself optimal.
  auto kuhn = [&](std::size_t s, Vec2& pull, double& harmonic) {
    pull = {0.0, 0.0};
    harmonic = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == s) continue;
      const Vec2 d = x[i] - x[s];
      const double r = norm(d);
      pull = pull + d * (m[i] / r);
      harmonic += m[i] / r;
    }
    return norm(pull) <= m[s];
  };
  auto loss = [&](const Vec2& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += m[i] * norm(x[i] - c);
    return s;
  };

  std::vector<double> mv(m.begin(), m.end());
  Vec2 c = weighted_mean(x, mv);
  int it = 0;
  for (; it < max_iterations; ++it) {
    std::size_t nearest = 0;
    double nearest_d = kInfinity;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = norm(x[i] - c);
      if (r < nearest_d) {
        nearest_d = r;
        nearest = i;
      }
    }
    Vec2 next;
    if (nearest_d <= snap_tol) {
      Vec2 pull;
      double harmonic;
      if (kuhn(nearest, pull, harmonic)) {
        c = x[nearest];
        break;
      }
      const double pn = norm(pull);
      next = x[nearest] + pull * ((pn - m[nearest]) / (pn * harmonic));
    } else {
      double sx = 0.0, sy = 0.0, sw = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = m[i] / norm(x[i] - c);
        sx += w * x[i].x;
        sy += w * x[i].y;
        sw += w;
      }
      next = {sx / sw, sy / sw};
    }
    const double step = norm(next - c);
    c = next;
    if (step < step_tol) {
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.hit_iteration_cap = it >= max_iterations;

  // Weiszfeld is only linearly convergent and crawls when the optimum sits
  // close to a heavy site.  Finish with safeguarded Newton steps on the
  // smooth loss; a step is taken only if it lowers the loss.
  for (int polish = 0; polish < 100; ++polish) {
    double gx = 0.0, gy = 0.0, hxx = 0.0, hxy = 0.0, hyy = 0.0;
    bool at_site = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const Vec2 d = c - x[i];
      const double r = norm(d);
      if (r <= snap_tol) {
        at_site = true;
        break;
      }
      const double ux = d.x / r, uy = d.y / r, s = m[i] / r;
      gx += m[i] * ux;
      gy += m[i] * uy;
      hxx += s * (1.0 - ux * ux);
      hxy -= s * ux * uy;
      hyy += s * (1.0 - uy * uy);
    }
    const double det = hxx * hyy - hxy * hxy;
    if (at_site || !(det > 0.0)) break;
    const Vec2 delta{-(hyy * gx - hxy * gy) / det, -(hxx * gy - hxy * gx) / det};
    const double f0 = loss(c);
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const Vec2 trial = c + delta * t;
      if (loss(trial) < f0) {
        c = trial;
        moved = true;
        break;
      }
    }
    if (!moved || norm(delta) * t <= 1e-15 * diameter) break;
  }

  // Weiszfeld creeps toward an optimal data point; settle it exactly.
  std::size_t nearest = 0;
  double nearest_d = kInfinity;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = norm(x[i] - c);
    if (r < nearest_d) {
      nearest_d = r;
      nearest = i;
    }
  }
  Vec2 pull;
  double harmonic;
  if (nearest_d > 0.0 && kuhn(nearest, pull, harmonic) && loss(x[nearest]) <= loss(c)) {
    c = x[nearest];
  }
  result.center = c;
  return result;
}

GeometricMedian update_center_continuous(const MetricSpec& metric, std::span<const Vec2> points,
                                         std::span<const double> masses) {
  if (!(total_mass(masses) > 0.0)) empty_cluster();
  switch (metric.kind()) {
    case MetricKind::SquaredEuclidean: return {weighted_mean(points, masses), 0, false};
    case MetricKind::Euclidean: return geometric_median(points, masses);
    case MetricKind::Manhattan: return {weighted_median(points, masses), 0, false};
    default: break;
  }
  throw Error(ErrorCode::InvalidProblem, metric.name() + " has no continuous location step");
}

double cluster_loss(const Problem& problem, std::span<const double> masses,
                    const Location& location) {
  double s = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    if (masses[i] != 0.0) {
      s += masses[i] * distance(problem.metric, i, problem.points[i].pos, location);
    }
  }
  return s;
}

std::size_t update_center_discrete(const Problem& problem, std::span<const double> masses) {
  if (!(total_mass(masses) > 0.0)) empty_cluster();
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    if (masses[i] != 0.0) members.push_back(i);
  }
  std::size_t best = 0;
  double best_loss = kInfinity;
  for (std::size_t h = 0; h < problem.site_count(); ++h) {
    const Location site = problem.site(h);
    double s = 0.0;
    for (std::size_t i : members) {
      s += masses[i] * distance(problem.metric, i, problem.points[i].pos, site);
      if (s >= best_loss) break;
    }
    if (s < best_loss) {
      best_loss = s;
      best = h;
    }
  }
  return best;
}

Location optimal_location(const Problem& problem, std::span<const double> masses,
                          int* weiszfeld_cap_hits) {
  if (problem.centers.placement == Placement::Discrete) {
    return problem.site(update_center_discrete(problem, masses));
  }
  std::vector<Vec2> pts(problem.n());
  for (std::size_t i = 0; i < problem.n(); ++i) pts[i] = problem.points[i].pos;
  const GeometricMedian g = update_center_continuous(problem.metric, pts, masses);
  if (g.hit_iteration_cap && weiszfeld_cap_hits) ++*weiszfeld_cap_hits;
  return Location{g.center, -1};
}

ReleaseDecision decide_release(const Problem& problem, std::size_t fixed_index,
                               std::span<const double> masses, bool currently_released,
                               const Location& current, int* weiszfeld_cap_hits) {
  const Location& home = problem.centers.fixed.at(fixed_index);
  const double lambda_f = problem.centers.release_lambda;
  ReleaseDecision out;

  if (!(total_mass(masses) > 0.0)) {
    // Nothing to serve: relocating gains nothing.
    if (currently_released && 0.0 >= lambda_f) {
      out.released = true;
      out.location = current;
    } else {
      out.location = home;
    }
    return out;
  }

  Location best = optimal_location(problem, masses, weiszfeld_cap_hits);
  double best_loss = cluster_loss(problem, masses, best);
  if (currently_released) {
    const double current_loss = cluster_loss(problem, masses, current);
    if (current_loss < best_loss) {
      best = current;
      best_loss = current_loss;
    }
  }
  out.gain = cluster_loss(problem, masses, home) - best_loss;

  const bool release = currently_released ? !(out.gain < lambda_f) : out.gain > lambda_f;
  out.released = release;
  out.location = release ? best : home;
  return out;
}

}  // namespace pack
