#include "pack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "pack/error.hpp"

namespace pack {
namespace {

using Wide = __int128;

Wide pairs(Wide count) { return count * (count - 1) / 2; }

}  // namespace

double adjusted_rand_index(std::span<const long> a, std::span<const long> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "partitions have " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()) + " labels");
  }
  std::map<std::pair<long, long>, long> joint;
  std::map<long, long> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  Wide index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [key, c] : joint) index += pairs(c);
  for (const auto& [key, c] : rows) sum_a += pairs(c);
  for (const auto& [key, c] : cols) sum_b += pairs(c);
  const Wide total = pairs(static_cast<Wide>(a.size()));

  // (index - sum_a sum_b / total) / ((sum_a + sum_b) / 2 - sum_a sum_b / total)
  const Wide num = 2 * (index * total - sum_a * sum_b);
  const Wide den = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
  if (den == 0) {
    const bool identical = joint.size() == rows.size() && joint.size() == cols.size();
    return identical ? 1.0 : 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<long> hardened_labels(const Assignment& assignment) {
  std::vector<long> labels(assignment.n());
  for (std::size_t i = 0; i < assignment.n(); ++i) labels[i] = assignment.hardened_label(i);
  return labels;
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistanceSummary summarize(std::vector<double> values, std::vector<double> weights,
                          SummaryWeighting weighting) {
  if (weights.size() != values.size()) {
    throw Error(ErrorCode::LengthMismatch, "values and weights differ in length");
  }
  DistanceSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> v(values.size()), w(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    v[r] = values[order[r]];
    w[r] = weights[order[r]];
  }

  if (weighting == SummaryWeighting::PerPoint) {
    s.mean = pairwise_sum(v) / static_cast<double>(v.size());
    s.median = quantile_type7(v, 0.5);
    s.q95 = quantile_type7(v, 0.95);
    return s;
  }

  double total = 0.0, weighted = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    total += w[r];
    weighted += w[r] * v[r];
  }
  if (!(total > 0.0)) {
    const std::size_t count = values.size();
    return summarize(std::move(values), std::vector<double>(count, 1.0), SummaryWeighting::PerPoint);
  }
  auto inverse_cdf = [&](double p) {
    double cumulative = 0.0;
    for (std::size_t r = 0; r < v.size(); ++r) {
      cumulative += w[r];
      if (cumulative >= p * total) return v[r];
    }
    return v.back();
  };
  s.mean = weighted / total;
  s.median = inverse_cdf(0.5);
  s.q95 = inverse_cdf(0.95);
  return s;
}

DistanceSummary distance_summary(const Problem& problem, const Solution& solution,
                                 SummaryWeighting weighting) {
  const Assignment& y = solution.assignment;
  std::vector<double> values, weights;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const Point& p = problem.points[i];
    if (p.pseudo) continue;
    double share = 0.0, dist = 0.0;
    for (int j = 0; j < y.k(); ++j) {
      const double yij = y.at(i, j);
      if (yij == 0.0) continue;
      share += yij;
      dist += yij * distance(problem.metric, i, p.pos, solution.centers[j]);
    }
    if (share <= 0.0) continue;
    values.push_back(dist / share);
    weights.push_back(p.weight);
  }
  return summarize(std::move(values), std::move(weights), weighting);
}

}  // namespace pack
