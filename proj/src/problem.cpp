#include "pack/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "pack/error.hpp"

namespace pack {

Point make_pseudo_point(std::int64_t id, Vec2 pos, double gamma) {
  Point p;
  p.id = id;
  p.pos = pos;
  p.preference = gamma;
  p.pseudo = true;
  return p;
}

std::size_t Problem::site_count() const {
  if (metric.kind() == MetricKind::Matrix) return metric.costs().cols();
  return centers.candidates.size();
}

Location Problem::site(std::size_t h) const {
  Location loc;
  loc.site = static_cast<std::ptrdiff_t>(h);
  if (h < centers.candidates.size()) loc.pos = centers.candidates[h];
  return loc;
}

Assignment::Assignment(std::size_t n, int k, bool has_outlier, Membership mode)
    : y_(n, static_cast<std::size_t>(k) + (has_outlier ? 1 : 0), 0.0),
      k_(k),
      has_outlier_(has_outlier),
      mode_(mode) {}

void Assignment::set_outlier(std::size_t i, double v) {
  if (!has_outlier_) {
    if (v != 0.0) throw Error(ErrorCode::ShapeMismatch, "assignment has no outlier column");
    return;
  }
  y_(i, static_cast<std::size_t>(k_)) = v;
}

double Assignment::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t c = 0; c < y_.cols(); ++c) s += y_(i, c);
  return s;
}

double Assignment::load(std::span<const Point> points, int j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i) s += points[i].capacity_coeff * at(i, j);
  return s;
}

int Assignment::hardened_label(std::size_t i) const {
  int best = -1;
  double best_y = outlier(i);
  for (int j = 0; j < k_; ++j) {
    // Strict comparison keeps the lowest index; real centers win ties
    // against the outlier column.
    if (at(i, j) > best_y || (best == -1 && at(i, j) == best_y && best_y > 0.0)) {
      best = j;
      best_y = at(i, j);
    }
  }
  return best;
}

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

Problem validate_problem(Problem problem) {
  const MetricSpec& metric = problem.metric;
  CenterSpec& cs = problem.centers;

  if (metric.kind() == MetricKind::Threshold && cs.placement != Placement::Discrete) {
    fail(ErrorCode::ThresholdRequiresDiscrete, "threshold metric needs discrete placement");
  }
  if (metric.kind() == MetricKind::Matrix && cs.placement != Placement::Discrete) {
    fail(ErrorCode::ThresholdRequiresDiscrete, "distance-matrix metric needs discrete placement");
  }
  if (cs.k < 1) fail(ErrorCode::InvalidProblem, "k must be at least 1");
  if (static_cast<std::size_t>(cs.k) < cs.fixed.size()) {
    fail(ErrorCode::KTooSmall, "k = " + std::to_string(cs.k) + " is below the " +
                                   std::to_string(cs.fixed.size()) + " fixed centers");
  }
  if (problem.points.empty()) fail(ErrorCode::InvalidProblem, "no points");

  std::set<std::int64_t> ids;
  for (const Point& p : problem.points) {
    const std::string where = "point " + std::to_string(p.id);
    if (!(finite_nonneg(p.weight) && finite_nonneg(p.preference) &&
          finite_nonneg(p.capacity_coeff))) {
      fail(ErrorCode::NegativeWeight, where + " has a negative or non-finite w, gamma or a");
    }
    if (p.coverage < 1) fail(ErrorCode::InvalidProblem, where + " has Q < 1");
    if (p.pseudo && (p.weight != 0.0 || p.capacity_coeff != 0.0)) {
      fail(ErrorCode::InvalidProblem, where + " is a pseudo-point with nonzero w or a");
    }
    if (metric.kind() != MetricKind::Matrix) {
      if (!p.has_coords) fail(ErrorCode::InvalidProblem, where + " has no coordinates");
      if (!std::isfinite(p.pos.x) || !std::isfinite(p.pos.y)) {
        fail(ErrorCode::InvalidProblem, where + " has non-finite coordinates");
      }
    }
    if (!ids.insert(p.id).second) fail(ErrorCode::InvalidProblem, "duplicate " + where);
  }

  if (metric.kind() == MetricKind::Matrix) {
    const Matrix& d = metric.costs();
    if (d.rows() != problem.n()) {
      fail(ErrorCode::ShapeMismatch, "distance matrix has " + std::to_string(d.rows()) +
                                         " rows for " + std::to_string(problem.n()) + " points");
    }
    if (!cs.candidates.empty() && cs.candidates.size() != d.cols()) {
      fail(ErrorCode::ShapeMismatch, "candidate list does not match distance-matrix columns");
    }
  }

  if (cs.placement == Placement::Discrete) {
    const std::size_t s = problem.site_count();
    if (s < static_cast<std::size_t>(cs.k)) {
      fail(ErrorCode::InvalidProblem, "discrete placement needs at least k candidate sites");
    }
    std::set<std::ptrdiff_t> used;
    for (Location& f : cs.fixed) {
      if (f.site < 0) {
        // Resolve by coordinates.
        auto it = std::find(cs.candidates.begin(), cs.candidates.end(), f.pos);
        if (it == cs.candidates.end()) {
          fail(ErrorCode::FixedCenterNotCandidate, "fixed center is not a candidate site");
        }
        f.site = it - cs.candidates.begin();
      }
      if (static_cast<std::size_t>(f.site) >= s) {
        fail(ErrorCode::FixedCenterNotCandidate,
             "fixed center references site " + std::to_string(f.site));
      }
      f = problem.site(static_cast<std::size_t>(f.site));
      if (!used.insert(f.site).second) {
        fail(ErrorCode::InvalidProblem, "two fixed centers share a candidate site");
      }
    }
  } else {
    for (Location& f : cs.fixed) {
      f.site = -1;
      if (!std::isfinite(f.pos.x) || !std::isfinite(f.pos.y)) {
        fail(ErrorCode::InvalidProblem, "fixed center has non-finite coordinates");
      }
    }
  }
  if (!(cs.release_lambda >= 0.0)) fail(ErrorCode::InvalidProblem, "release penalty must be >= 0");

  if (problem.capacity) {
    const CapacityWindow& w = *problem.capacity;
    if (!(w.lower >= 0.0) || std::isnan(w.upper)) {
      fail(ErrorCode::InvalidProblem, "capacity limits must be nonnegative numbers");
    }
    if (w.lower > w.upper) {
      std::ostringstream os;
      os << "lower limit " << w.lower << " exceeds upper limit " << w.upper;
      fail(ErrorCode::CapacityWindowInverted, os.str());
    }
  }
  if (problem.outlier_lambda && !finite_nonneg(*problem.outlier_lambda)) {
    fail(ErrorCode::InvalidProblem, "outlier penalty must be finite and >= 0");
  }
  if (!finite_nonneg(problem.opening_lambda)) {
    fail(ErrorCode::InvalidProblem, "opening cost must be finite and >= 0");
  }
  return problem;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ObjectiveBreakdown evaluate_objective(const Problem& problem, std::span<const Location> centers,
                                      const Assignment& y, std::size_t released_count) {
  const std::size_t n = problem.n();
  if (y.n() != n || y.k() != problem.k() || centers.size() != static_cast<std::size_t>(y.k()) ||
      y.has_outlier() != problem.has_outliers()) {
    throw Error(ErrorCode::ShapeMismatch, "solution shape does not match the problem");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return problem.points[a].id < problem.points[b].id;
  });

  std::vector<double> dist(n, 0.0);
  std::vector<double> out(n, 0.0);
  const double lambda_o = problem.outlier_lambda.value_or(0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    const Point& p = problem.points[i];
    const double w = p.effective_weight();
    double s = 0.0;
    for (int j = 0; j < y.k(); ++j) {
      const double yij = y.at(i, j);
      if (yij != 0.0) s += w * distance(problem.metric, i, p.pos, centers[j]) * yij;
    }
    dist[r] = s;
    if (y.has_outlier()) out[r] = lambda_o * w * y.outlier(i);
  }

  ObjectiveBreakdown ob;
  ob.distance_term = pairwise_sum(dist);
  ob.outlier_term = pairwise_sum(out);
  ob.opening_term = problem.opening_lambda * problem.k();
  ob.release_term =
      released_count == 0 ? 0.0 : problem.centers.release_lambda * static_cast<double>(released_count);
  ob.total = ob.distance_term + ob.outlier_term + ob.opening_term + ob.release_term;
  return ob;
}

ObjectiveBreakdown evaluate_objective(const Problem& problem, const Solution& solution) {
  return evaluate_objective(problem, solution.centers, solution.assignment,
                            solution.released.size());
}

std::string check_assignment(const Problem& problem, const Assignment& y, double load_tolerance) {
  if (y.n() != problem.n() || y.k() != problem.k() || y.has_outlier() != problem.has_outliers()) {
    return "shape mismatch";
  }
  const bool hard = y.mode() == Membership::Hard;
  const double row_tol = hard ? 0.0 : std::max(load_tolerance, 1e-9);
  for (std::size_t i = 0; i < y.n(); ++i) {
    const int q = problem.points[i].coverage;
    for (int j = 0; j < y.k(); ++j) {
      const double v = y.at(i, j);
      if (hard ? (v != 0.0 && v != 1.0) : (v < 0.0 || v > 1.0)) {
        return "entry (" + std::to_string(i) + "," + std::to_string(j) + ") out of range";
      }
    }
    const double o = y.outlier(i);
    if (o < 0.0 || o > q || (hard && o != std::floor(o))) {
      return "outlier entry of row " + std::to_string(i) + " out of range";
    }
    if (std::abs(y.row_sum(i) - q) > row_tol) {
      return "row " + std::to_string(i) + " sums to " + std::to_string(y.row_sum(i)) +
             " instead of " + std::to_string(q);
    }
  }
  if (problem.capacity) {
    for (int j = 0; j < y.k(); ++j) {
      const double load = y.load(problem.points, j);
      if (load < problem.capacity->lower - load_tolerance ||
          load > problem.capacity->upper + load_tolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "center " << j << " load " << load << " outside [" << problem.capacity->lower
           << ", " << problem.capacity->upper << "]";
        return os.str();
      }
    }
  }
  return {};
}

}  // namespace pack
