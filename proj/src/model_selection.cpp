#include "pack/model_selection.hpp"

#include <cmath>
#include <limits>

#include "pack/error.hpp"

namespace pack {

SweepReport overlay_penalties(std::vector<int> k_values, std::vector<double> base_objectives,
                              const std::vector<double>& lambda_grid) {
  SweepReport report;
  report.k_values = std::move(k_values);
  report.base_objectives = std::move(base_objectives);
  const std::size_t nk = report.k_values.size();
  for (std::size_t i = 0; i + 1 < nk; ++i) {
    report.first_differences.push_back(report.base_objectives[i + 1] - report.base_objectives[i]);
  }

  std::map<int, int> votes;
  for (double lambda : lambda_grid) {
    PenalizedCurve curve;
    curve.lambda = lambda;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nk; ++i) {
      const double v = report.base_objectives[i] + lambda * report.k_values[i];
      curve.values.push_back(v);
      if (v < best || (v == best && report.k_values[i] < curve.argmin_k)) {
        best = v;
        curve.argmin_k = report.k_values[i];
      }
    }
    if (std::isfinite(best)) ++votes[curve.argmin_k];
    report.penalized.push_back(std::move(curve));
  }
  int most = 0;
  for (const auto& [k, count] : votes) {
    if (count > most) {  // map order keeps the smaller k on ties
      most = count;
      report.consensus_k = k;
    }
  }
  return report;
}

SweepReport sweep_k(const Problem& base, const std::vector<int>& k_values,
                    const std::vector<double>& lambda_grid, const SolverConfig& config) {
  if (k_values.empty()) throw Error(ErrorCode::InvalidProblem, "empty k range");
  std::vector<double> objectives;
  std::vector<std::optional<Solution>> solutions;
  std::vector<std::string> errors;
  for (int k : k_values) {
    if (static_cast<std::size_t>(k) < base.m()) {
      throw Error(ErrorCode::KTooSmall, "k = " + std::to_string(k) + " is below the fixed centers");
    }
    Problem p = base;
    p.centers.k = k;
    p.opening_lambda = 0.0;
    try {
      p = validate_problem(std::move(p));
      Solution s = solve(p, config);
      objectives.push_back(s.objective.total);
      solutions.emplace_back(std::move(s));
      errors.emplace_back();
    } catch (const Error& e) {
      objectives.push_back(std::numeric_limits<double>::quiet_NaN());
      solutions.emplace_back();
      errors.emplace_back(e.what());
    }
  }
  SweepReport report = overlay_penalties(k_values, std::move(objectives), lambda_grid);
  report.solutions = std::move(solutions);
  report.errors = std::move(errors);
  return report;
}

std::pair<double, double> aic_bic_lambda(double variance, long n) {
  if (!(variance > 0.0)) throw Error(ErrorCode::NonpositiveVariance, "variance must be positive");
  if (n < 2) throw Error(ErrorCode::InvalidProblem, "n must be at least 2");
  return {4.0 * variance, 2.0 * std::log(static_cast<double>(n)) * variance};
}

}  // namespace pack
