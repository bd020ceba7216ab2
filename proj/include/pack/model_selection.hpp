#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pack/solver.hpp"

namespace pack {

struct PenalizedCurve {
  double lambda = 0.0;
  // base + lambda * k for each swept k (NaN where the solve failed).
  std::vector<double> values;
  int argmin_k = 0;
};

struct SweepReport {
  std::vector<int> k_values;
  // Minimized objective without the opening cost, per k (NaN on failure).
  std::vector<double> base_objectives;
  // base_objectives[i+1] - base_objectives[i].
  std::vector<double> first_differences;
  std::vector<PenalizedCurve> penalized;
  // The k chosen by the most penalties; smaller k on ties.
  int consensus_k = 0;
  std::vector<std::optional<Solution>> solutions;
  // Error text per k for failed solves (empty when solved).
  std::vector<std::string> errors;
};

// Solves `base` once per k (opening cost removed) and overlays each penalty
// of `lambda_grid` analytically.
SweepReport sweep_k(const Problem& base, const std::vector<int>& k_values,
                    const std::vector<double>& lambda_grid, const SolverConfig& config);

// Builds the report from already computed base objectives.
SweepReport overlay_penalties(std::vector<int> k_values, std::vector<double> base_objectives,
                              const std::vector<double>& lambda_grid);

// Guideline opening costs for the squared Euclidean loss with Gaussian
// clusters of known variance: AIC gives 4 sigma^2, BIC 2 ln(n) sigma^2.
std::pair<double, double> aic_bic_lambda(double variance, long n);

}  // namespace pack
