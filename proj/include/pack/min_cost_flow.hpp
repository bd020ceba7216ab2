#pragma once

#include <cstddef>
#include <vector>

namespace pack {

// Primal network simplex for min-cost flow with real-valued bounds.
//
// Arcs carry [lower, upper] bounds; lower bounds are shifted into node
// supplies before solving.  The initial basis is a star of artificial arcs
// around an extra root node, driven out in a first phase that minimizes
// artificial flow (no big-M cost).  Pivoting keeps the spanning tree
// strongly feasible, which rules out cycling on degenerate pivots.
class MinCostFlow {
 public:
  enum class Status { Optimal, Infeasible };

  explicit MinCostFlow(int num_nodes);

  // `upper` may be +infinity.
  int add_arc(int from, int to, double lower, double upper, double cost);
  void set_arc_bounds(int arc, double lower, double upper);
  // Positive supply produces flow, negative consumes it.
  void set_supply(int node, double supply);

  Status solve();

  int num_nodes() const { return num_nodes_; }
  int num_arcs() const { return static_cast<int>(lower_.size()); }
  double flow(int arc) const { return flow_[arc] + lower_[arc]; }
  double total_cost() const;
  double potential(int node) const { return pi_[node]; }
  // cost + pi(from) - pi(to); zero on every basic arc at optimality.
  double reduced_cost(int arc) const;
  bool is_basic(int arc) const { return state_[arc] == kTree; }
  long pivots() const { return pivots_; }

 private:
  static constexpr signed char kLower = 1;
  static constexpr signed char kTree = 0;
  static constexpr signed char kUpper = -1;

  void build_initial_tree(const std::vector<double>& supply, double big);
  void refresh_tree(const std::vector<double>& cost);
  bool run_phase(const std::vector<double>& cost, double tol);
  double residual_up(int arc) const { return cap_[arc] - flow_[arc]; }

  int num_nodes_;
  std::vector<double> supply_;

  // Real arcs followed by one artificial arc per node.
  std::vector<int> from_, to_;
  std::vector<double> lower_, upper_, cost_;
  std::vector<double> cap_, flow_;
  std::vector<signed char> state_;

  // Spanning tree over nodes 0..num_nodes_ (the last one is the root).
  std::vector<int> parent_, pred_arc_, depth_;
  std::vector<double> pi_;
  std::vector<int> child_start_, child_list_, order_;

  long pivots_ = 0;
  int next_block_start_ = 0;
};

}  // namespace pack
