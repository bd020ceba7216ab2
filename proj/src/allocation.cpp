#include "pack/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <vector>

#include "pack/error.hpp"
#include "pack/min_cost_flow.hpp"

namespace pack {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kIntegralityTol = 1e-9;

// Sends point i's Q_i slots to its nearest centers, spilling to the outlier
// column past lambda_o.  Boundary d == lambda_o stays assigned.
void assign_nearest(const Problem& problem, const Matrix& d, std::size_t i, Assignment& y) {
  const int k = problem.k();
  const int q = problem.points[i].coverage;
  if (!problem.has_outliers() && q > k) {
    throw Error(ErrorCode::QExceedsK, "point " + std::to_string(problem.points[i].id) +
                                          " needs " + std::to_string(q) + " centers but k = " +
                                          std::to_string(k));
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(i, a) < d(i, b); });
  int spilled = 0;
  for (int s = 0; s < q; ++s) {
    if (s < k && (!problem.has_outliers() || d(i, order[s]) <= *problem.outlier_lambda)) {
      y.at(i, order[s]) = 1.0;
    } else {
      ++spilled;
    }
  }
  if (spilled > 0) y.set_outlier(i, spilled);
}

double assignment_cost(const Problem& problem, const Matrix& d, const Assignment& y) {
  const double lambda_o = problem.outlier_lambda.value_or(0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const double w = problem.points[i].effective_weight();
    for (int j = 0; j < problem.k(); ++j) {
      if (y.at(i, j) != 0.0) total += w * d(i, j) * y.at(i, j);
    }
    total += lambda_o * w * y.outlier(i);
  }
  return total;
}

bool absorbed_coverage(const Problem& problem, const Assignment& y) {
  if (!y.has_outlier()) return false;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    if (problem.points[i].coverage > 1 && y.outlier(i) > kIntegralityTol) return true;
  }
  return false;
}

// LP relaxation of the capacitated allocation as a min-cost flow over the
// points with a_i > 0.  Points with a_i = 0 never touch a capacity limit and
// are assigned to their nearest centers up front.
class Relaxation {
 public:
  Relaxation(const Problem& problem, const Matrix& d, double lower, double upper)
      : problem_(problem), k_(problem.k()), cols_(problem.k() + 1) {
    for (std::size_t i = 0; i < problem.n(); ++i) {
      if (problem.points[i].capacity_coeff > 0.0) capacitated_.push_back(i);
    }
    check_certificates(lower, upper);

    const int np = static_cast<int>(capacitated_.size());
    const int outlier_node = problem.has_outliers() ? np + k_ : -1;
    const int sink = np + k_ + (problem.has_outliers() ? 1 : 0);
    flow_ = std::make_unique<MinCostFlow>(sink + 1);

    np_ = np;
    lower_ = lower;
    upper_ = upper;
    adj_.resize(sink + 1);
    auto add = [&](int from, int to, double lo, double up, double cost) {
      const int arc = flow_->add_arc(from, to, lo, up, cost);
      from_.push_back(from);
      to_.push_back(to);
      cost_.push_back(cost);
      adj_[from].push_back(arc);
      adj_[to].push_back(arc);
      return arc;
    };

    double demand = 0.0;
    arcs_.assign(static_cast<std::size_t>(np) * cols_, -1);
    for (int p = 0; p < np; ++p) {
      const Point& pt = problem.points[capacitated_[p]];
      const double a = pt.capacity_coeff;
      const double unit = pt.effective_weight() / a;
      flow_->set_supply(p, a * pt.coverage);
      demand += a * pt.coverage;
      for (int j = 0; j < k_; ++j) {
        arcs_[p * cols_ + j] = add(p, np + j, 0.0, a, unit * d(capacitated_[p], j));
        var_of_arc_.push_back(p * cols_ + j);
      }
      if (outlier_node >= 0) {
        arcs_[p * cols_ + k_] = add(p, outlier_node, 0.0, a * pt.coverage, unit * *problem.outlier_lambda);
        var_of_arc_.push_back(p * cols_ + k_);
      }
    }
    first_center_arc_ = static_cast<int>(from_.size());
    for (int j = 0; j < k_; ++j) add(np + j, sink, lower, upper, 0.0);
    if (outlier_node >= 0) outlier_arc_ = add(outlier_node, sink, 0.0, kInfinity, 0.0);
    flow_->set_supply(sink, -demand);

    base_ = Assignment(problem.n(), k_, problem.has_outliers(), problem.membership);
    for (std::size_t i = 0; i < problem.n(); ++i) {
      if (problem.points[i].capacity_coeff == 0.0) assign_nearest(problem, d, i, base_);
    }
    base_cost_ = assignment_cost(problem, d, base_);
  }

  int num_vars() const { return static_cast<int>(capacitated_.size()) * cols_; }
  int cols() const { return cols_; }
  bool has_var(int v) const { return arcs_[v] >= 0; }
  double coverage(int v) const { return problem_.points[capacitated_[v / cols_]].coverage; }

  // Solves with integer bounds on every y variable (in units of y, not z).
  // Returns the LP value plus the fixed part from a_i = 0 points, or nullopt
  // when infeasible.  `values` receives y for every variable.
  std::optional<double> solve(const std::vector<std::int16_t>& lb,
                              const std::vector<std::int16_t>& ub, std::vector<double>& values,
                              std::vector<double>* duals = nullptr) {
    for (int v = 0; v < num_vars(); ++v) {
      if (arcs_[v] < 0) continue;
      const double a = problem_.points[capacitated_[v / cols_]].capacity_coeff;
      flow_->set_arc_bounds(arcs_[v], a * lb[v], a * ub[v]);
    }
    if (flow_->solve() != MinCostFlow::Status::Optimal) return std::nullopt;
    values.assign(num_vars(), 0.0);
    for (int v = 0; v < num_vars(); ++v) {
      if (arcs_[v] < 0) continue;
      const double a = problem_.points[capacitated_[v / cols_]].capacity_coeff;
      values[v] = std::clamp(flow_->flow(arcs_[v]) / a, 0.0, static_cast<double>(ub[v]));
    }
    if (duals) {
      duals->resize(adj_.size());
      for (std::size_t u = 0; u < adj_.size(); ++u) (*duals)[u] = flow_->potential(static_cast<int>(u));
    }
    return flow_->total_cost() + base_cost_;
  }

  // Re-optimizes after the bounds of variable `var` changed, starting from
  // the optimal `values` and `duals` of the parent problem.  The variable's
  // flow moves to its nearest new bound and the displaced amount is re-routed
  // along shortest paths in the residual network under reduced costs, which
  // keeps the duals feasible (successive shortest paths).
  std::optional<double> reoptimize(const std::vector<std::int16_t>& lb,
                                   const std::vector<std::int16_t>& ub, int var,
                                   std::vector<double>& values, std::vector<double>& duals) {
    const int m = static_cast<int>(from_.size());
    std::vector<double> flow(m, 0.0), lo(m), up(m);
    for (int arc = 0; arc < m; ++arc) {
      if (arc < first_center_arc_) {
        const int v = var_of_arc_[arc];
        const double a = coeff(v);
        flow[arc] = a * values[v];
        lo[arc] = a * lb[v];
        up[arc] = a * ub[v];
        flow[first_center_arc_ + (v % cols_ == k_ ? k_ : v % cols_)] += flow[arc];
      } else if (arc == outlier_arc_) {
        lo[arc] = 0.0;
        up[arc] = kInfinity;
      } else {
        lo[arc] = lower_;
        up[arc] = upper_;
      }
    }
    // The outlier arc sits right after the k center arcs, so the sums above
    // landed in the right slots.

    const int moved_arc = arcs_[var];
    const double target = std::clamp(flow[moved_arc], lo[moved_arc], up[moved_arc]);
    double excess = flow[moved_arc] - target;
    flow[moved_arc] = target;
    const double eps = 1e-12 * std::max(1.0, coeff(var));
    int source = from_[moved_arc], sink = to_[moved_arc];
    if (excess < 0.0) {
      std::swap(source, sink);
      excess = -excess;
    }

    const int nodes = static_cast<int>(adj_.size());
    std::vector<double> dist(nodes);
    std::vector<int> via(nodes);
    std::vector<char> done(nodes);
    using Entry = std::pair<double, int>;
    while (excess > eps) {
      std::fill(dist.begin(), dist.end(), kInfinity);
      std::fill(via.begin(), via.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
      dist[source] = 0.0;
      heap.push({0.0, source});
      while (!heap.empty()) {
        const auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == sink) break;
        for (int arc : adj_[u]) {
          const bool forward = from_[arc] == u;
          const double residual = forward ? up[arc] - flow[arc] : flow[arc] - lo[arc];
          if (!(residual > eps)) continue;
          const int w = forward ? to_[arc] : from_[arc];
          if (done[w]) continue;
          const double rc = cost_[arc] + duals[from_[arc]] - duals[to_[arc]];
          const double nd = du + std::max(0.0, forward ? rc : -rc);
          if (nd < dist[w]) {
            dist[w] = nd;
            via[w] = arc;
            heap.push({nd, w});
          }
        }
      }
      if (!done[sink]) return std::nullopt;
      for (int u = 0; u < nodes; ++u) duals[u] += done[u] ? dist[u] : dist[sink];

      double push = excess;
      for (int w = sink; w != source;) {
        const int arc = via[w];
        const bool forward = to_[arc] == w;
        push = std::min(push, forward ? up[arc] - flow[arc] : flow[arc] - lo[arc]);
        w = forward ? from_[arc] : to_[arc];
      }
      for (int w = sink; w != source;) {
        const int arc = via[w];
        const bool forward = to_[arc] == w;
        flow[arc] += forward ? push : -push;
        w = forward ? from_[arc] : to_[arc];
      }
      excess -= push;
    }

    double total = base_cost_;
    for (int arc = 0; arc < first_center_arc_; ++arc) {
      const int v = var_of_arc_[arc];
      values[v] = std::clamp(flow[arc] / coeff(v), static_cast<double>(lb[v]), static_cast<double>(ub[v]));
      total += cost_[arc] * flow[arc];
    }
    return total;
  }

  // Root bounds: real-center entries in [0, 1], outlier entry in [0, Q_i].
  void root_bounds(std::vector<std::int16_t>& lb, std::vector<std::int16_t>& ub) const {
    lb.assign(num_vars(), 0);
    ub.assign(num_vars(), 0);
    for (int v = 0; v < num_vars(); ++v) {
      if (arcs_[v] < 0) continue;
      ub[v] = (v % cols_ == k_) ? static_cast<std::int16_t>(coverage(v)) : 1;
    }
  }

  Assignment to_assignment(const std::vector<double>& values, bool round) const {
    Assignment y = base_;
    for (int v = 0; v < num_vars(); ++v) {
      if (arcs_[v] < 0) continue;
      const std::size_t i = capacitated_[v / cols_];
      const int j = v % cols_;
      const double val = round ? std::round(values[v]) : values[v];
      if (j == k_) {
        y.set_outlier(i, val);
      } else {
        y.at(i, j) = val;
      }
    }
    return y;
  }

  const MinCostFlow& flow() const { return *flow_; }

 private:
  void check_certificates(double lower, double upper) const {
    double total = 0.0;
    double reachable = 0.0;
    for (std::size_t i : capacitated_) {
      const Point& p = problem_.points[i];
      if (!problem_.has_outliers() && p.coverage > k_) {
        throw Error(ErrorCode::QExceedsK, "point " + std::to_string(p.id) + " needs " +
                                              std::to_string(p.coverage) + " centers but k = " +
                                              std::to_string(k_));
      }
      total += p.capacity_coeff * p.coverage;
      reachable += p.capacity_coeff * std::min(p.coverage, k_);
    }
    std::ostringstream os;
    os.precision(17);
    if (!problem_.has_outliers() && total > k_ * upper * (1 + 1e-12)) {
      os << "upper limit: k*U = " << k_ * upper << " < total demand " << total;
      throw Error(ErrorCode::Infeasible, os.str());
    }
    if (reachable < k_ * lower * (1 - 1e-12)) {
      os << "lower limit: k*L = " << k_ * lower << " > assignable demand " << reachable;
      throw Error(ErrorCode::Infeasible, os.str());
    }
  }

  double coeff(int v) const { return problem_.points[capacitated_[v / cols_]].capacity_coeff; }

  const Problem& problem_;
  int k_;
  int cols_;
  int np_ = 0;
  double lower_ = 0.0, upper_ = kInfinity;
  std::vector<std::size_t> capacitated_;
  std::vector<int> arcs_;
  // Mirror of the network for re-optimization; arcs in MinCostFlow order.
  std::vector<int> from_, to_, var_of_arc_;
  std::vector<double> cost_;
  std::vector<std::vector<int>> adj_;
  int first_center_arc_ = 0;
  int outlier_arc_ = -1;
  std::unique_ptr<MinCostFlow> flow_;
  Assignment base_;
  double base_cost_ = 0.0;
};

CapacityWindow window_of(const Problem& problem) {
  return problem.capacity.value_or(CapacityWindow{0.0, kInfinity});
}

AllocationResult finish(const Problem& problem, const Matrix& d, Assignment y) {
  AllocationResult r;
  r.cost = assignment_cost(problem, d, y);
  r.bound = r.cost;
  r.outlier_absorbed_coverage = absorbed_coverage(problem, y);
  r.assignment = std::move(y);
  return r;
}

}  // namespace

AllocationResult allocate_uncapacitated(const Problem& problem, std::span<const Location> centers) {
  const Matrix d = distance_table(problem, centers);
  Assignment y(problem.n(), problem.k(), problem.has_outliers(), problem.membership);
  for (std::size_t i = 0; i < problem.n(); ++i) assign_nearest(problem, d, i, y);
  return finish(problem, d, std::move(y));
}

AllocationResult allocate_fractional(const Problem& problem, std::span<const Location> centers) {
  const Matrix d = distance_table(problem, centers);
  const CapacityWindow w = window_of(problem);
  Relaxation lp(problem, d, w.lower, w.upper);
  std::vector<std::int16_t> lb, ub;
  lp.root_bounds(lb, ub);
  std::vector<double> values;
  if (!lp.solve(lb, ub, values)) {
    throw Error(ErrorCode::Infeasible, "no fractional allocation satisfies the capacity window");
  }
  return finish(problem, d, lp.to_assignment(values, false));
}

namespace {

// Bound change on the path from the root.
struct Fix {
  int var;
  std::int16_t lb, ub;
};

// Open node, stored compactly: the branching path instead of full bound
// vectors and only the nonzero LP values.
struct Node {
  double bound;
  long id;
  std::vector<Fix> fixes;
  std::vector<int> ones;
  std::vector<std::pair<int, double>> others;
  std::vector<double> duals;

  void store(const std::vector<double>& values) {
    for (int v = 0; v < static_cast<int>(values.size()); ++v) {
      if (values[v] == 1.0) ones.push_back(v);
      else if (values[v] != 0.0) others.emplace_back(v, values[v]);
    }
  }
  void load(std::vector<double>& values) const {
    std::fill(values.begin(), values.end(), 0.0);
    for (int v : ones) values[v] = 1.0;
    for (const auto& [v, x] : others) values[v] = x;
  }
};

// Open nodes kept before the search counts as out of budget (a few hundred
// MB for thousand-point instances).
constexpr std::size_t kMaxOpenNodes = 100'000;

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Most fractional variable, lowest index on ties; -1 when integral.
int branching_variable(const std::vector<double>& values) {
  int best = -1;
  double best_score = kIntegralityTol;
  for (int v = 0; v < static_cast<int>(values.size()); ++v) {
    const double frac = values[v] - std::floor(values[v]);
    const double score = std::min(frac, 1.0 - frac);
    if (score > best_score) {
      best_score = score;
      best = v;
    }
  }
  return best;
}

std::optional<AllocationResult> try_uniform_fast_path(const Problem& problem, const Matrix& d) {
  double common = 0.0;
  for (const Point& p : problem.points) {
    if (p.capacity_coeff == 0.0) continue;
    if (common == 0.0) common = p.capacity_coeff;
    if (p.capacity_coeff != common) return std::nullopt;
  }
  const CapacityWindow w = window_of(problem);
  if (common == 0.0) return std::nullopt;
  const double lower = common * std::ceil(w.lower / common - 1e-9);
  const double upper =
      std::isfinite(w.upper) ? common * std::floor(w.upper / common + 1e-9) : kInfinity;
  if (lower > upper) {
    std::ostringstream os;
    os.precision(17);
    os << "no multiple of the common capacity coefficient " << common << " lies in ["
       << w.lower << ", " << w.upper << "]";
    throw Error(ErrorCode::Infeasible, os.str());
  }
  Relaxation lp(problem, d, lower, upper);
  std::vector<std::int16_t> lb, ub;
  lp.root_bounds(lb, ub);
  std::vector<double> values;
  if (!lp.solve(lb, ub, values)) {
    throw Error(ErrorCode::Infeasible, "no binary allocation satisfies the capacity window");
  }
  for (double v : values) {
    if (std::abs(v - std::round(v)) > 1e-6) return std::nullopt;
  }
  AllocationResult r = finish(problem, d, lp.to_assignment(values, true));
  r.integral_fast_path = true;
  r.nodes = 1;
  return r;
}

// Greedy rounding of an LP allocation followed by load repair and local
// search (single moves, then pairwise swaps), the usual primal heuristic for
// generalized assignment.  Returns nullopt when repair gets stuck.
class Rounder {
 public:
  Rounder(const Problem& problem, const Matrix& d, const CapacityWindow& window)
      : problem_(problem), d_(d), window_(window), k_(problem.k()) {}

  std::optional<Assignment> run(const Assignment& lp) {
    const std::size_t n = problem_.n();
    y_ = Assignment(n, k_, problem_.has_outliers(), Membership::Hard);
    for (std::size_t i = 0; i < n; ++i) round_row(lp, i);
    load_.assign(k_, 0.0);
    for (int j = 0; j < k_; ++j) load_[j] = y_.load(problem_.points, j);
    if (!repair()) return std::nullopt;
    improve();
    if (!check_assignment(problem_, y_, 0.0).empty()) return std::nullopt;
    return y_;
  }

 private:
  // Column k_ stands for the outlier column.
  double unit_cost(std::size_t i, int col) const {
    const double w = problem_.points[i].effective_weight();
    return col == k_ ? w * *problem_.outlier_lambda : w * d_(i, col);
  }
  double a(std::size_t i) const { return problem_.points[i].capacity_coeff; }
  double violation(double load) const {
    return std::max(0.0, load - window_.upper) + std::max(0.0, window_.lower - load);
  }
  bool holds(std::size_t i, int col) const {
    return col == k_ ? y_.outlier(i) > 0.0 : y_.at(i, col) != 0.0;
  }
  bool accepts(std::size_t i, int col) const {
    if (col == k_) return y_.has_outlier();
    return y_.at(i, col) == 0.0;
  }

  void round_row(const Assignment& lp, std::size_t i) {
    std::vector<double> share(k_ + 1, 0.0);
    for (int j = 0; j < k_; ++j) share[j] = lp.at(i, j);
    share[k_] = lp.outlier(i);
    for (int slot = 0; slot < problem_.points[i].coverage; ++slot) {
      int best = -1;
      for (int col = 0; col <= k_; ++col) {
        if (!accepts(i, col)) continue;
        if (best < 0 || share[col] > share[best] ||
            (share[col] == share[best] && unit_cost(i, col) < unit_cost(i, best))) {
          best = col;
        }
      }
      if (best < 0) break;  // Q_i > k without an outlier column: caught later
      if (best == k_) {
        y_.set_outlier(i, y_.outlier(i) + 1.0);
      } else {
        y_.at(i, best) = 1.0;
      }
      share[best] -= 1.0;
    }
  }

  void move(std::size_t i, int from, int to) {
    if (from == k_) y_.set_outlier(i, y_.outlier(i) - 1.0);
    else y_.at(i, from) = 0.0, load_[from] -= a(i);
    if (to == k_) y_.set_outlier(i, y_.outlier(i) + 1.0);
    else y_.at(i, to) = 1.0, load_[to] += a(i);
  }

  double violation_change(std::size_t i, int from, int to) const {
    double dv = 0.0;
    if (from < k_) dv += violation(load_[from] - a(i)) - violation(load_[from]);
    if (to < k_) dv += violation(load_[to] + a(i)) - violation(load_[to]);
    return dv;
  }

  bool repair() {
    const std::size_t max_moves = 8 * problem_.n() + 100;
    for (std::size_t it = 0; it < max_moves; ++it) {
      double total = 0.0;
      for (int j = 0; j < k_; ++j) total += violation(load_[j]);
      if (total <= 0.0) return true;
      // Cheapest cost increase per unit of violation removed.
      double best_ratio = kInfinity;
      std::size_t best_i = 0;
      int best_from = -1, best_to = -1;
      for (std::size_t i = 0; i < problem_.n(); ++i) {
        if (a(i) == 0.0) continue;
        for (int from = 0; from <= k_; ++from) {
          if (!holds(i, from)) continue;
          for (int to = 0; to <= k_; ++to) {
            if (to == from || !accepts(i, to)) continue;
            const double dv = violation_change(i, from, to);
            if (!(dv < -1e-12 * std::max(1.0, total))) continue;
            const double ratio = (unit_cost(i, to) - unit_cost(i, from)) / -dv;
            if (ratio < best_ratio) {
              best_ratio = ratio;
              best_i = i;
              best_from = from;
              best_to = to;
            }
          }
        }
      }
      if (best_from < 0) return false;
      move(best_i, best_from, best_to);
    }
    return false;
  }

  bool fits_after(int col, double delta) const {
    if (col == k_) return true;
    const double load = load_[col] + delta;
    return load <= window_.upper && load >= window_.lower;
  }

  void improve() {
    const std::size_t n = problem_.n();
    for (int pass = 0; pass < 50; ++pass) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (a(i) == 0.0) continue;
        for (int from = 0; from <= k_; ++from) {
          if (!holds(i, from)) continue;
          int best_to = -1;
          double best_gain = 1e-12 * std::max(1.0, unit_cost(i, from));
          for (int to = 0; to <= k_; ++to) {
            if (to == from || !accepts(i, to)) continue;
            if (!fits_after(from, -a(i)) || !fits_after(to, a(i))) continue;
            const double gain = unit_cost(i, from) - unit_cost(i, to);
            if (gain > best_gain) {
              best_gain = gain;
              best_to = to;
            }
          }
          if (best_to >= 0) {
            move(i, from, best_to);
            changed = true;
            break;
          }
        }
      }
      if (!changed) changed = swap_pass();
      if (!changed) return;
    }
  }

  // Exchanges of two points between two real centers; loads change by the
  // difference of their capacity coefficients.
  bool swap_pass() {
    const std::size_t n = problem_.n();
    std::vector<std::vector<std::size_t>> members(k_);
    for (std::size_t i = 0; i < n; ++i) {
      if (a(i) == 0.0) continue;
      for (int j = 0; j < k_; ++j) {
        if (y_.at(i, j) != 0.0) members[j].push_back(i);
      }
    }
    bool changed = false;
    for (int j1 = 0; j1 < k_; ++j1) {
      for (int j2 = j1 + 1; j2 < k_; ++j2) {
        for (std::size_t p : members[j1]) {
          if (y_.at(p, j1) == 0.0 || y_.at(p, j2) != 0.0) continue;
          for (std::size_t q : members[j2]) {
            if (y_.at(q, j2) == 0.0 || y_.at(q, j1) != 0.0 || p == q) continue;
            const double gain = unit_cost(p, j1) + unit_cost(q, j2) - unit_cost(p, j2) -
                                unit_cost(q, j1);
            if (!(gain > 1e-12 * std::max(1.0, unit_cost(p, j1) + unit_cost(q, j2)))) continue;
            const double shift = a(q) - a(p);  // change of j1's load
            if (!fits_after(j1, shift) || !fits_after(j2, -shift)) continue;
            move(p, j1, j2);
            move(q, j2, j1);
            changed = true;
            break;
          }
        }
      }
    }
    return changed;
  }

  const Problem& problem_;
  const Matrix& d_;
  CapacityWindow window_;
  int k_;
  Assignment y_;
  std::vector<double> load_;
};

}  // namespace

AllocationResult allocate_hard(const Problem& problem, std::span<const Location> centers,
                               const HardLimits& limits) {
  const auto start = Clock::now();
  const Matrix d = distance_table(problem, centers);
  if (auto fast = try_uniform_fast_path(problem, d)) return std::move(*fast);

  const CapacityWindow w = window_of(problem);
  Relaxation lp(problem, d, w.lower, w.upper);

  std::optional<Assignment> incumbent;
  double incumbent_cost = kInfinity;
  long explored = 0;
  long created = 0;

  auto offer = [&](Assignment y) {
    const double c = assignment_cost(problem, d, y);
    if (c < incumbent_cost) {
      incumbent_cost = c;
      incumbent = std::move(y);
    }
  };
  if (limits.warm_start && check_assignment(problem, *limits.warm_start, 0.0).empty()) {
    Assignment y = *limits.warm_start;
    offer(std::move(y));
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  auto dominated = [&](double bound) {
    return std::isfinite(incumbent_cost) &&
           bound >= incumbent_cost - 1e-12 * std::max(1.0, std::abs(incumbent_cost));
  };
  auto push = [&](std::vector<Fix> fixes, std::optional<double> bound,
                  const std::vector<double>& values, std::vector<double> duals) {
    ++created;
    if (!bound || dominated(*bound)) return;
    if (branching_variable(values) < 0) {
      offer(lp.to_assignment(values, true));
      return;
    }
    Node node{*bound, created, std::move(fixes), {}, {}, std::move(duals)};
    node.store(values);
    open.push(std::move(node));
  };

  std::vector<std::int16_t> root_lb, root_ub;
  lp.root_bounds(root_lb, root_ub);
  {
    std::vector<double> values, duals;
    const auto bound = lp.solve(root_lb, root_ub, values, &duals);
    push({}, bound, values, std::move(duals));
    if (!open.empty()) {
      if (auto y = Rounder(problem, d, w).run(lp.to_assignment(values, false))) {
        offer(std::move(*y));
      }
    }
  }

  bool exhausted = false;
  std::vector<std::int16_t> lb, ub;
  std::vector<double> parent_values(lp.num_vars()), values, duals;
  while (!open.empty()) {
    if (dominated(open.top().bound)) {
      open = {};
      break;
    }
    if (Seconds(Clock::now() - start) > limits.time_budget ||
        (limits.node_limit > 0 && explored >= limits.node_limit) || open.size() > kMaxOpenNodes) {
      exhausted = true;
      break;
    }
    Node node = std::move(const_cast<Node&>(open.top()));
    open.pop();
    ++explored;

    lb = root_lb;
    ub = root_ub;
    for (const Fix& f : node.fixes) {
      lb[f.var] = f.lb;
      ub[f.var] = f.ub;
    }
    node.load(parent_values);

    const int v = branching_variable(parent_values);
    const double val = parent_values[v];
    const std::int16_t down = static_cast<std::int16_t>(std::floor(val));
    const std::int16_t up = static_cast<std::int16_t>(std::ceil(val));
    for (int side = 0; side < 2; ++side) {
      const std::int16_t saved_lb = lb[v], saved_ub = ub[v];
      if (side == 0) ub[v] = down;
      else lb[v] = up;
      values = parent_values;
      duals = node.duals;
      const auto bound = lp.reoptimize(lb, ub, v, values, duals);
      std::vector<Fix> fixes = node.fixes;
      fixes.push_back({v, lb[v], ub[v]});
      push(std::move(fixes), bound, values, duals);
      lb[v] = saved_lb;
      ub[v] = saved_ub;
    }
  }

  if (!incumbent) {
    if (exhausted) {
      throw Error(ErrorCode::NoIncumbentWithinBudget,
                  "branch-and-bound found no binary allocation within the budget");
    }
    throw Error(ErrorCode::Infeasible,
                "no binary allocation satisfies the capacity window (branch-and-bound exhausted)");
  }

  AllocationResult r = finish(problem, d, std::move(*incumbent));
  r.nodes = explored;
  if (exhausted) {
    r.proven_optimal = false;
    r.budget_exhausted = true;
    r.bound = std::min(r.cost, open.top().bound);
  }
  return r;
}

AllocationResult allocate_hard(const Problem& problem, std::span<const Location> centers,
                               Seconds time_budget) {
  HardLimits limits;
  limits.time_budget = time_budget;
  return allocate_hard(problem, centers, limits);
}

AllocationResult allocate(const Problem& problem, std::span<const Location> centers,
                          const HardLimits& limits) {
  if (!problem.capacity) return allocate_uncapacitated(problem, centers);
  if (problem.membership == Membership::Fractional) return allocate_fractional(problem, centers);
  return allocate_hard(problem, centers, limits);
}

}  // namespace pack
