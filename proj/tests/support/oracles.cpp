#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pack/metrics.hpp"

namespace oracle {
namespace {

constexpr double kEps = 1e-10;

// Tableau rows: constraint rows then the objective row; last column is rhs.
struct Tableau {
  std::vector<std::vector<double>> t;
  std::vector<int> basis;
  int cols = 0;

  void pivot(int r, int c) {
    const double p = t[r][c];
    for (double& v : t[r]) v /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == r || t[i][c] == 0.0) continue;
      const double f = t[i][c];
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Minimizes the objective row over columns [0, usable); Bland's rule.
  void run(int usable) {
    const int m = static_cast<int>(basis.size());
    std::vector<double>& obj = t[m];
    for (;;) {
      int enter = -1;
      for (int j = 0; j < usable; ++j) {
        if (obj[j] < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] > kEps) {
          const double ratio = t[i][cols] / t[i][enter];
          if (leave < 0 || ratio < best - kEps ||
              (std::abs(ratio - best) <= kEps && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return;  // unbounded; callers only pass bounded programs
      pivot(leave, enter);
    }
  }
};

}  // namespace

std::optional<LpResult> solve_lp(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.rows.size());
  int slacks = 0;
  for (char s : lp.sense) slacks += s != '=';
  const int cols = n + slacks + m;  // originals, slacks, artificials

  Tableau tab;
  tab.cols = cols;
  tab.t.assign(m + 1, std::vector<double>(cols + 1, 0.0));
  tab.basis.assign(m, -1);
  int slack = n;
  for (int i = 0; i < m; ++i) {
    const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.t[i][j] = sign * lp.rows[i][j];
    if (lp.sense[i] != '=') {
      tab.t[i][slack++] = sign * (lp.sense[i] == '<' ? 1.0 : -1.0);
    }
    tab.t[i][n + slacks + i] = 1.0;
    tab.t[i][cols] = sign * lp.rhs[i];
    tab.basis[i] = n + slacks + i;
  }
  // Phase 1: minimize the sum of artificials.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= cols; ++j) {
      if (j < n + slacks || j == cols) tab.t[m][j] -= tab.t[i][j];
    }
  }
  tab.run(cols);
  if (-tab.t[m][cols] > 1e-8) return std::nullopt;
  // Drive remaining artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n + slacks) continue;
    for (int j = 0; j < n + slacks; ++j) {
      if (std::abs(tab.t[i][j]) > kEps) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  // Phase 2.
  std::fill(tab.t[m].begin(), tab.t[m].end(), 0.0);
  for (int j = 0; j < n; ++j) tab.t[m][j] = lp.c[j];
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[i];
    if (b < n && tab.t[m][b] != 0.0) {
      const double f = tab.t[m][b];
      for (int j = 0; j <= cols; ++j) tab.t[m][j] -= f * tab.t[i][j];
    }
  }
  tab.run(n + slacks);

  LpResult r;
  r.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) r.x[tab.basis[i]] = tab.t[i][cols];
  }
  for (int j = 0; j < n; ++j) r.value += lp.c[j] * r.x[j];
  return r;
}

std::optional<double> fractional_allocation_value(const pack::Problem& problem,
                                                  std::span<const pack::Location> centers) {
  const int n = static_cast<int>(problem.n());
  const int k = problem.k();
  const int cols = k + (problem.has_outliers() ? 1 : 0);
  auto var = [&](int i, int j) { return i * cols + j; };

  LinearProgram lp;
  lp.c.assign(static_cast<std::size_t>(n) * cols, 0.0);
  for (int i = 0; i < n; ++i) {
    const pack::Point& p = problem.points[i];
    const double w = p.weight + p.preference;
    for (int j = 0; j < k; ++j) {
      lp.c[var(i, j)] = w * pack::distance(problem.metric, i, p.pos, centers[j]);
    }
    if (problem.has_outliers()) lp.c[var(i, k)] = w * *problem.outlier_lambda;
  }
  const std::size_t nv = lp.c.size();
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(nv, 0.0);
    for (int j = 0; j < cols; ++j) row[var(i, j)] = 1.0;
    lp.add_row(row, '=', problem.points[i].coverage);
    for (int j = 0; j < k; ++j) {
      std::vector<double> ub(nv, 0.0);
      ub[var(i, j)] = 1.0;
      lp.add_row(ub, '<', 1.0);
    }
  }
  if (problem.capacity) {
    for (int j = 0; j < k; ++j) {
      std::vector<double> row(nv, 0.0);
      for (int i = 0; i < n; ++i) row[var(i, j)] = problem.points[i].capacity_coeff;
      if (problem.capacity->lower > 0.0) lp.add_row(row, '>', problem.capacity->lower);
      if (std::isfinite(problem.capacity->upper)) lp.add_row(row, '<', problem.capacity->upper);
    }
  }
  const auto r = solve_lp(lp);
  if (!r) return std::nullopt;
  return r->value;
}

std::optional<double> brute_force_hard_value(const pack::Problem& problem,
                                             std::span<const pack::Location> centers) {
  const int n = static_cast<int>(problem.n());
  const int k = problem.k();
  const int cols = k + (problem.has_outliers() ? 1 : 0);
  std::vector<std::vector<double>> cost(n, std::vector<double>(cols));
  for (int i = 0; i < n; ++i) {
    const pack::Point& p = problem.points[i];
    const double w = p.weight + p.preference;
    for (int j = 0; j < k; ++j) cost[i][j] = w * pack::distance(problem.metric, i, p.pos, centers[j]);
    if (cols > k) cost[i][k] = w * *problem.outlier_lambda;
  }
  const double lo = problem.capacity ? problem.capacity->lower : 0.0;
  const double hi = problem.capacity ? problem.capacity->upper : std::numeric_limits<double>::infinity();

  std::optional<double> best;
  std::vector<int> choice(n, 0);
  for (;;) {
    std::vector<double> load(k, 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += cost[i][choice[i]];
      if (choice[i] < k) load[choice[i]] += problem.points[i].capacity_coeff;
    }
    bool ok = true;
    for (int j = 0; j < k; ++j) ok = ok && load[j] >= lo && load[j] <= hi;
    if (ok && (!best || total < *best)) best = total;

    int pos = 0;
    while (pos < n && ++choice[pos] == cols) choice[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

std::vector<std::vector<pack::Vec2>> lloyd(std::span<const pack::Vec2> points,
                                           std::vector<pack::Vec2> init, int max_iterations,
                                           bool* empty_cluster) {
  std::vector<std::vector<pack::Vec2>> history{init};
  std::vector<pack::Vec2> c = std::move(init);
  const std::size_t k = c.size();
  if (empty_cluster) *empty_cluster = false;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> sx(k, 0.0), sy(k, 0.0), cnt(k, 0.0);
    for (const pack::Vec2& p : points) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double dx = p.x - c[j].x, dy = p.y - c[j].y;
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      sx[best] += p.x;
      sy[best] += p.y;
      cnt[best] += 1.0;
    }
    std::vector<pack::Vec2> next(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (cnt[j] == 0.0) {
        if (empty_cluster) *empty_cluster = true;
        return history;
      }
      next[j] = {sx[j] / cnt[j], sy[j] / cnt[j]};
    }
    history.push_back(next);
    if (next == c) break;
    c = next;
  }
  return history;
}

pack::Vec2 grid_geometric_median(std::span<const pack::Vec2> points, std::span<const double> masses) {
  auto loss = [&](double x, double y) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      s += masses[i] * std::hypot(points[i].x - x, points[i].y - y);
    }
    return s;
  };
  double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
  for (const pack::Vec2& p : points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  constexpr int kGrid = 200;
  double bx = x0, by = y0;
  for (int round = 0; round < 40; ++round) {
    const double hx = (x1 - x0) / kGrid, hy = (y1 - y0) / kGrid;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= kGrid; ++a) {
      for (int b = 0; b <= kGrid; ++b) {
        const double x = x0 + a * hx, y = y0 + b * hy;
        const double v = loss(x, y);
        if (v < best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    }
    // Keep a few cells of slack around the incumbent.
    x0 = bx - 4 * hx;
    x1 = bx + 4 * hx;
    y0 = by - 4 * hy;
    y1 = by + 4 * hy;
    if (hx < 1e-13 && hy < 1e-13) break;
  }
  return {bx, by};
}

double pair_counting_ari(std::span<const long> a, std::span<const long> b) {
  long long both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++both;
      else if (sa) ++only_a;
      else if (sb) ++only_b;
      else ++neither;
    }
  }
  const long long num = 2 * (both * neither - only_a * only_b);
  const long long den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
  if (den == 0) return only_a == 0 && only_b == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace oracle
