#pragma once

#include <cstdint>
#include <vector>

#include "pack/problem.hpp"
#include "pack/solver.hpp"

namespace pack {

// Bivariate distribution with gamma marginals joined by a Gaussian copula.
struct GammaCopula {
  double shape_x = 1.0, scale_x = 1.0;
  double shape_y = 1.0, scale_y = 1.0;
  double rho = 0.0;

  Vec2 mean() const { return {shape_x * scale_x, shape_y * scale_y}; }
  double max_sd() const;
};

// Draws correlated standard normals, maps them through the normal CDF and
// then through the gamma quantile functions.
std::vector<Vec2> sample_gamma_copula_cluster(const GammaCopula& dist, std::size_t size, Rng& rng);

struct GenSpec {
  std::vector<int> cluster_sizes{20, 20, 40, 40, 50, 50, 60, 60, 80, 80};
  double shape_lo = 0.0, shape_hi = 15.0;
  double scale_lo = 0.0, scale_hi = 100.0;
  double rho_lo = -0.7, rho_hi = 0.7;
  // Cluster means are moved to distinct cells of a ceil(sqrt(C))^2 grid
  // spanning this many standard deviations of the widest cluster.
  double grid_side_sd = 6.0;
  // Pull toward the cluster mean; 1 leaves the sample unchanged.
  double shrink = 0.5;
  double w_lo = 1.0, w_hi = 100.0;
  // Share of clusters whose weights grow linearly with distance from the mean.
  double edge_heavy_fraction = 0.5;
  int n_outliers = 20;
  // Rescale the final coordinates so the longer bounding-box side is 1.
  bool normalize = true;
  std::uint64_t seed = 0;
};

void validate_gen_spec(const GenSpec& spec);

struct Dataset {
  std::vector<Point> points;
  // Ground-truth cluster per point; injected outliers get kNoiseLabel.
  std::vector<long> labels;
  std::vector<GammaCopula> clusters;
  std::vector<Vec2> cluster_centers;
};

inline constexpr long kNoiseLabel = -1;

Dataset generate_dataset(const GenSpec& spec);

}  // namespace pack
