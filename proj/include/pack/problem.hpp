#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pack/geometry.hpp"
#include "pack/metrics.hpp"

namespace pack {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A weighted demand / data location.
struct Point {
  std::int64_t id = 0;
  Vec2 pos;
  bool has_coords = true;
  double weight = 0.0;          // w: demand mass in the loss
  double preference = 0.0;      // gamma: pseudo-weight attracting centers
  double capacity_coeff = 0.0;  // a: mass counted against center capacity
  int coverage = 1;             // Q: number of centers the point is assigned to
  bool pseudo = false;          // prior pseudo-point (w = 0, a = 0)

  double effective_weight() const { return weight + preference; }
};

// Builds a prior pseudo-point: attracts centers with strength `gamma` but
// carries no demand and consumes no capacity.
Point make_pseudo_point(std::int64_t id, Vec2 pos, double gamma);

enum class Placement { Continuous, Discrete };
enum class Membership { Hard, Fractional };

struct CenterSpec {
  Placement placement = Placement::Continuous;
  // Candidate sites p_1..p_s.  May be left empty with the Matrix metric, in
  // which case the matrix columns define the sites.
  std::vector<Vec2> candidates;
  // Fixed centers f_1..f_m; they occupy center slots 0..m-1.  In discrete
  // placement each must reference a candidate site.
  std::vector<Location> fixed;
  // Penalty for releasing one fixed center; infinity means never releasable.
  double release_lambda = kInfinity;
  int k = 1;
};

struct CapacityWindow {
  double lower = 0.0;
  double upper = kInfinity;
};

struct Problem {
  std::vector<Point> points;
  MetricSpec metric = MetricSpec::squared_euclidean();
  CenterSpec centers;
  Membership membership = Membership::Hard;
  std::optional<CapacityWindow> capacity;
  std::optional<double> outlier_lambda;
  double opening_lambda = 0.0;

  std::size_t n() const { return points.size(); }
  int k() const { return centers.k; }
  std::size_t m() const { return centers.fixed.size(); }
  bool has_outliers() const { return outlier_lambda.has_value(); }

  // Number of candidate sites (matrix columns when no coordinates given).
  std::size_t site_count() const;
  // Location object for candidate site h.
  Location site(std::size_t h) const;
};

// Membership matrix y: n x k real-center columns plus an optional outlier
// column.  Real-center entries lie in [0, 1]; the outlier entry of point i
// lies in [0, Q_i].
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t n, int k, bool has_outlier, Membership mode);

  std::size_t n() const { return y_.rows(); }
  int k() const { return k_; }
  bool has_outlier() const { return has_outlier_; }
  Membership mode() const { return mode_; }

  double& at(std::size_t i, int j) { return y_(i, static_cast<std::size_t>(j)); }
  double at(std::size_t i, int j) const { return y_(i, static_cast<std::size_t>(j)); }
  double outlier(std::size_t i) const { return has_outlier_ ? y_(i, k_) : 0.0; }
  void set_outlier(std::size_t i, double v);

  double row_sum(std::size_t i) const;
  // Sum_i a_i y_ij for real center j.
  double load(std::span<const Point> points, int j) const;
  // Index of the largest membership (ties to the lowest center), or -1 when
  // the outlier column dominates.
  int hardened_label(std::size_t i) const;

  const Matrix& matrix() const { return y_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  Matrix y_;
  int k_ = 0;
  bool has_outlier_ = false;
  Membership mode_ = Membership::Hard;
};

struct ObjectiveBreakdown {
  double distance_term = 0.0;
  double outlier_term = 0.0;
  double opening_term = 0.0;
  double release_term = 0.0;
  double total = 0.0;

  friend bool operator==(const ObjectiveBreakdown&, const ObjectiveBreakdown&) = default;
};

struct SolveDiagnostics {
  int iterations = 0;
  int restarts = 0;
  int best_restart = 0;
  int weiszfeld_cap_hits = 0;
  int reseeded_centers = 0;
  bool allocation_proven_optimal = true;
  double allocation_gap = 0.0;
  bool budget_exhausted = false;
  bool integral_fast_path = false;
  // Some point with Q_i > 1 left part of its coverage in the outlier column.
  bool outlier_absorbed_coverage = false;

  friend bool operator==(const SolveDiagnostics&, const SolveDiagnostics&) = default;
};

struct Solution {
  std::vector<Location> centers;
  Assignment assignment;
  // Indices (into CenterSpec::fixed) of released fixed centers, ascending.
  std::vector<std::size_t> released;
  ObjectiveBreakdown objective;
  SolveDiagnostics diagnostics;
};

// Checks the instance and returns a normalized copy.  Throws pack::Error.
Problem validate_problem(Problem problem);

// Exact evaluation of the penalized objective for `centers`/`assignment`
// with `released_count` released fixed centers.  Point contributions are
// combined by pairwise summation in ascending id order.
ObjectiveBreakdown evaluate_objective(const Problem& problem, std::span<const Location> centers,
                                      const Assignment& assignment, std::size_t released_count);

ObjectiveBreakdown evaluate_objective(const Problem& problem, const Solution& solution);

// Pairwise (cascade) summation of `values` in the given order.
double pairwise_sum(std::span<const double> values);

// Checks the row-sum, entry-range and capacity invariants.  `load_tolerance`
// is absolute; pass 0 for an exact check.  Returns an empty string when the
// assignment is feasible, otherwise a description of the first violation.
std::string check_assignment(const Problem& problem, const Assignment& assignment,
                             double load_tolerance);

}  // namespace pack
