#include "pack/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pack {

MinCostFlow::MinCostFlow(int num_nodes) : num_nodes_(num_nodes), supply_(num_nodes, 0.0) {}

int MinCostFlow::add_arc(int from, int to, double lower, double upper, double cost) {
  from_.push_back(from);
  to_.push_back(to);
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  return static_cast<int>(from_.size()) - 1;
}

void MinCostFlow::set_arc_bounds(int arc, double lower, double upper) {
  lower_[arc] = lower;
  upper_[arc] = upper;
}

void MinCostFlow::set_supply(int node, double supply) { supply_[node] = supply; }

double MinCostFlow::total_cost() const {
  double c = 0.0;
  for (int a = 0; a < num_arcs(); ++a) c += cost_[a] * flow(a);
  return c;
}

double MinCostFlow::reduced_cost(int arc) const {
  return cost_[arc] + pi_[from_[arc]] - pi_[to_[arc]];
}

void MinCostFlow::build_initial_tree(const std::vector<double>& supply, double big) {
  const int m = num_arcs();
  const int root = num_nodes_;
  for (int v = 0; v < num_nodes_; ++v) {
    const int a = m + v;
    if (supply[v] >= 0.0) {
      from_[a] = v;
      to_[a] = root;
      flow_[a] = supply[v];
    } else {
      from_[a] = root;
      to_[a] = v;
      flow_[a] = -supply[v];
    }
    cap_[a] = big;
    state_[a] = kTree;
    parent_[v] = root;
    pred_arc_[v] = a;
  }
  parent_[root] = -1;
  pred_arc_[root] = -1;
}

// Recomputes depth and potentials from the parent array.
void MinCostFlow::refresh_tree(const std::vector<double>& cost) {
  const int total = num_nodes_ + 1;
  const int root = num_nodes_;
  std::fill(child_start_.begin(), child_start_.end(), 0);
  for (int v = 0; v < total; ++v) {
    if (parent_[v] >= 0) ++child_start_[parent_[v] + 1];
  }
  for (int v = 0; v < total; ++v) child_start_[v + 1] += child_start_[v];
  std::vector<int> fill(child_start_.begin(), child_start_.end() - 1);
  for (int v = 0; v < total; ++v) {
    if (parent_[v] >= 0) child_list_[fill[parent_[v]]++] = v;
  }
  order_.clear();
  order_.push_back(root);
  depth_[root] = 0;
  pi_[root] = 0.0;
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const int u = order_[head];
    for (int c = child_start_[u]; c < child_start_[u + 1]; ++c) {
      const int v = child_list_[c];
      const int a = pred_arc_[v];
      depth_[v] = depth_[u] + 1;
      // Basic arcs have zero reduced cost: cost + pi(from) - pi(to) = 0.
      pi_[v] = from_[a] == v ? pi_[u] - cost[a] : pi_[u] + cost[a];
      order_.push_back(v);
    }
  }
}

bool MinCostFlow::run_phase(const std::vector<double>& cost, double tol) {
  const int total_arcs = static_cast<int>(cost.size());
  const int block = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(total_arcs))));
  constexpr long kMaxPivots = 200'000'000;

  refresh_tree(cost);
  for (;;) {
    // Block search pricing.
    int entering = -1;
    double best = tol;
    int scanned = 0;
    int e = next_block_start_ % total_arcs;
    int in_block = 0;
    while (scanned < total_arcs) {
      if (state_[e] != kTree && cap_[e] > 0.0) {
        const double rc = cost[e] + pi_[from_[e]] - pi_[to_[e]];
        const double violation = state_[e] * -rc;
        if (violation > best) {
          best = violation;
          entering = e;
        }
      }
      ++scanned;
      ++in_block;
      e = e + 1 == total_arcs ? 0 : e + 1;
      if (in_block == block) {
        if (entering >= 0) break;
        in_block = 0;
      }
    }
    next_block_start_ = e;
    if (entering < 0) return true;
    if (++pivots_ > kMaxPivots) throw std::runtime_error("network simplex pivot limit reached");

    int first, second;
    if (state_[entering] == kLower) {
      first = from_[entering];
      second = to_[entering];
    } else {
      first = to_[entering];
      second = from_[entering];
    }

    int u = first, v = second;
    while (u != v) {
      if (depth_[u] > depth_[v]) {
        u = parent_[u];
      } else if (depth_[v] > depth_[u]) {
        v = parent_[v];
      } else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    const int join = u;

    // Leaving arc: last blocking arc met when walking the cycle from the
    // join node in the direction of the flow change.
    double delta = cap_[entering];
    int u_out = -1;
    int side = 0;
    bool out_hits_upper = false;
    for (int x = first; x != join; x = parent_[x]) {
      const int a = pred_arc_[x];
      const bool increases = from_[a] == parent_[x];
      const double d = increases ? residual_up(a) : flow_[a];
      if (d < delta) {
        delta = d;
        u_out = x;
        side = 1;
        out_hits_upper = increases;
      }
    }
    for (int x = second; x != join; x = parent_[x]) {
      const int a = pred_arc_[x];
      const bool increases = from_[a] == x;
      const double d = increases ? residual_up(a) : flow_[a];
      if (d <= delta) {
        delta = d;
        u_out = x;
        side = 2;
        out_hits_upper = increases;
      }
    }

    if (delta > 0.0) {
      flow_[entering] += state_[entering] * delta;
      for (int x = first; x != join; x = parent_[x]) {
        const int a = pred_arc_[x];
        flow_[a] += from_[a] == parent_[x] ? delta : -delta;
      }
      for (int x = second; x != join; x = parent_[x]) {
        const int a = pred_arc_[x];
        flow_[a] += from_[a] == x ? delta : -delta;
      }
    }

    if (side == 0) {
      // Bound flip of the entering arc.
      if (state_[entering] == kLower) {
        flow_[entering] = cap_[entering];
        state_[entering] = kUpper;
      } else {
        flow_[entering] = 0.0;
        state_[entering] = kLower;
      }
      continue;
    }

    const int leaving = pred_arc_[u_out];
    if (out_hits_upper) {
      flow_[leaving] = cap_[leaving];
      state_[leaving] = kUpper;
    } else {
      flow_[leaving] = 0.0;
      state_[leaving] = kLower;
    }
    state_[entering] = kTree;

    // Re-hang the subtree cut off by the leaving arc below the entering arc.
    const int u_in = side == 1 ? first : second;
    int prev = side == 1 ? second : first;
    int prev_arc = entering;
    for (int x = u_in;;) {
      const int next_parent = parent_[x];
      const int next_arc = pred_arc_[x];
      parent_[x] = prev;
      pred_arc_[x] = prev_arc;
      if (x == u_out) break;
      prev = x;
      prev_arc = next_arc;
      x = next_parent;
    }
    refresh_tree(cost);
  }
}

MinCostFlow::Status MinCostFlow::solve() {
  const int m = static_cast<int>(lower_.size());
  const int total_nodes = num_nodes_ + 1;
  from_.resize(m);
  to_.resize(m);

  std::vector<double> supply = supply_;
  double scale = 1.0;
  for (int a = 0; a < m; ++a) {
    if (!(lower_[a] <= upper_[a])) return Status::Infeasible;
    supply[from_[a]] -= lower_[a];
    supply[to_[a]] += lower_[a];
  }
  double balance = 0.0;
  for (double s : supply) {
    balance += s;
    scale += std::abs(s);
  }
  const double flow_tol = 1e-9 * scale;
  if (std::abs(balance) > flow_tol) return Status::Infeasible;

  // No simple path carries more than the total supply.
  double big = scale;
  for (int a = 0; a < m; ++a) {
    if (std::isfinite(upper_[a])) big += upper_[a] - lower_[a];
  }

  from_.resize(m + num_nodes_);
  to_.resize(m + num_nodes_);
  cap_.assign(m + num_nodes_, 0.0);
  flow_.assign(m + num_nodes_, 0.0);
  state_.assign(m + num_nodes_, kLower);
  for (int a = 0; a < m; ++a) cap_[a] = std::min(upper_[a] - lower_[a], big);

  parent_.assign(total_nodes, -1);
  pred_arc_.assign(total_nodes, -1);
  depth_.assign(total_nodes, 0);
  pi_.assign(total_nodes, 0.0);
  child_start_.assign(total_nodes + 1, 0);
  child_list_.assign(total_nodes, 0);
  order_.reserve(total_nodes);
  pivots_ = 0;
  next_block_start_ = 0;

  build_initial_tree(supply, big);

  double max_cost = 1.0;
  for (int a = 0; a < m; ++a) max_cost = std::max(max_cost, std::abs(cost_[a]));

  // Phase 1: drive the artificial arcs to zero flow.
  std::vector<double> phase_cost(m + num_nodes_, 0.0);
  for (int a = m; a < m + num_nodes_; ++a) phase_cost[a] = 1.0;
  run_phase(phase_cost, 1e-12);
  double artificial = 0.0;
  for (int a = m; a < m + num_nodes_; ++a) artificial += flow_[a];
  if (artificial > flow_tol) {
    from_.resize(m);
    to_.resize(m);
    return Status::Infeasible;
  }

  // Phase 2: artificial arcs are pinned at zero.
  for (int a = m; a < m + num_nodes_; ++a) {
    flow_[a] = 0.0;
    cap_[a] = 0.0;
    if (state_[a] != kTree) state_[a] = kLower;
  }
  std::copy(cost_.begin(), cost_.end(), phase_cost.begin());
  std::fill(phase_cost.begin() + m, phase_cost.end(), 0.0);
  run_phase(phase_cost, 1e-12 * max_cost);

  from_.resize(m);
  to_.resize(m);
  // Snap flows to the original bounds to remove drift.
  for (int a = 0; a < m; ++a) {
    if (state_[a] == kLower) flow_[a] = 0.0;
    else if (state_[a] == kUpper) flow_[a] = cap_[a];
    flow_[a] = std::clamp(flow_[a], 0.0, cap_[a]);
  }
  return Status::Optimal;
}

}  // namespace pack
