#include "pack/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>

#include "pack/error.hpp"

namespace pack {
namespace {

// Uniform on the open interval (lo, hi).
double open_uniform(Rng& rng, double lo, double hi) {
  double u;
  do {
    u = uniform01(rng);
  } while (u == 0.0);
  return lo + (hi - lo) * u;
}

double gamma_quantile(double shape, double scale, double u) {
  return scale * boost::math::gamma_p_inv(shape, u);
}

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  // Fisher-Yates on our own uniform draws so the result is portable.
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

}  // namespace

double GammaCopula::max_sd() const {
  return std::max(std::sqrt(shape_x) * scale_x, std::sqrt(shape_y) * scale_y);
}

std::vector<Vec2> sample_gamma_copula_cluster(const GammaCopula& dist, std::size_t size, Rng& rng) {
  boost::random::normal_distribution<double> normal;
  const boost::math::normal_distribution<double> std_normal;
  const double tail = std::sqrt(1.0 - dist.rho * dist.rho);
  // Keep the CDF away from 0 and 1 where the quantile diverges.
  constexpr double kEps = 1e-15;
  std::vector<Vec2> out(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double z1 = normal(rng);
    const double z2 = dist.rho * z1 + tail * normal(rng);
    const double u1 = std::clamp(boost::math::cdf(std_normal, z1), kEps, 1.0 - kEps);
    const double u2 = std::clamp(boost::math::cdf(std_normal, z2), kEps, 1.0 - kEps);
    out[i] = {gamma_quantile(dist.shape_x, dist.scale_x, u1),
              gamma_quantile(dist.shape_y, dist.scale_y, u2)};
  }
  return out;
}

void validate_gen_spec(const GenSpec& spec) {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidProblem, what); };
  if (spec.cluster_sizes.empty()) bad("cluster_sizes must be nonempty");
  for (int s : spec.cluster_sizes) {
    if (s < 1) bad("cluster sizes must be positive");
  }
  if (!(spec.shape_lo >= 0.0 && spec.shape_lo <= spec.shape_hi && spec.shape_hi > 0.0)) {
    bad("invalid shape range");
  }
  if (!(spec.scale_lo >= 0.0 && spec.scale_lo <= spec.scale_hi && spec.scale_hi > 0.0)) {
    bad("invalid scale range");
  }
  if (!(spec.rho_lo > -1.0 && spec.rho_lo <= spec.rho_hi && spec.rho_hi < 1.0)) {
    bad("copula correlation must lie in (-1, 1)");
  }
  if (!(spec.shrink > 0.0 && spec.shrink <= 1.0)) bad("shrink must lie in (0, 1]");
  if (!(spec.grid_side_sd > 0.0)) bad("grid side must be positive");
  if (!(spec.w_lo >= 0.0 && spec.w_lo <= spec.w_hi)) bad("need 0 <= w_lo <= w_hi");
  if (!(spec.edge_heavy_fraction >= 0.0 && spec.edge_heavy_fraction <= 1.0)) {
    bad("edge_heavy_fraction must lie in [0, 1]");
  }
  if (spec.n_outliers < 0) bad("n_outliers must be >= 0");
}

Dataset generate_dataset(const GenSpec& spec) {
  validate_gen_spec(spec);
  Rng rng(spec.seed);
  const std::size_t nc = spec.cluster_sizes.size();
  Dataset ds;

  for (std::size_t c = 0; c < nc; ++c) {
    GammaCopula g;
    g.shape_x = open_uniform(rng, spec.shape_lo, spec.shape_hi);
    g.shape_y = open_uniform(rng, spec.shape_lo, spec.shape_hi);
    g.scale_x = open_uniform(rng, spec.scale_lo, spec.scale_hi);
    g.scale_y = open_uniform(rng, spec.scale_lo, spec.scale_hi);
    g.rho = spec.rho_lo + (spec.rho_hi - spec.rho_lo) * uniform01(rng);
    ds.clusters.push_back(g);
  }

  double widest = 0.0;
  for (const GammaCopula& g : ds.clusters) widest = std::max(widest, g.max_sd());
  const auto side_cells = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nc))));
  const double cell = spec.grid_side_sd * widest / static_cast<double>(side_cells);
  std::vector<std::size_t> cells(side_cells * side_cells);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  shuffle(cells, rng);

  std::vector<std::size_t> heavy_order(nc);
  std::iota(heavy_order.begin(), heavy_order.end(), std::size_t{0});
  shuffle(heavy_order, rng);
  const auto n_heavy =
      static_cast<std::size_t>(std::llround(spec.edge_heavy_fraction * static_cast<double>(nc)));
  std::vector<bool> edge_heavy(nc, false);
  for (std::size_t r = 0; r < n_heavy; ++r) edge_heavy[heavy_order[r]] = true;

  std::int64_t next_id = 1;
  for (std::size_t c = 0; c < nc; ++c) {
    const GammaCopula& g = ds.clusters[c];
    Rng sub(restart_seed(spec.seed, c));
    const std::vector<Vec2> raw =
        sample_gamma_copula_cluster(g, static_cast<std::size_t>(spec.cluster_sizes[c]), sub);
    const Vec2 center{(static_cast<double>(cells[c] % side_cells) + 0.5) * cell,
                      (static_cast<double>(cells[c] / side_cells) + 0.5) * cell};
    ds.cluster_centers.push_back(center);
    const Vec2 mu = g.mean();

    std::vector<Vec2> moved(raw.size());
    double r_max = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      moved[i] = center + (raw[i] - mu) * spec.shrink;
      r_max = std::max(r_max, norm(moved[i] - center));
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      Point p;
      p.id = next_id++;
      p.pos = moved[i];
      if (edge_heavy[c]) {
        const double r = r_max > 0.0 ? norm(moved[i] - center) / r_max : 0.0;
        p.weight = spec.w_lo + (spec.w_hi - spec.w_lo) * r;
      } else {
        p.weight = spec.w_lo + (spec.w_hi - spec.w_lo) * uniform01(sub);
      }
      p.capacity_coeff = p.weight;
      ds.points.push_back(p);
      ds.labels.push_back(static_cast<long>(c));
    }
  }

  double min_x = kInfinity, max_x = -kInfinity, min_y = kInfinity, max_y = -kInfinity;
  for (const Point& p : ds.points) {
    min_x = std::min(min_x, p.pos.x);
    max_x = std::max(max_x, p.pos.x);
    min_y = std::min(min_y, p.pos.y);
    max_y = std::max(max_y, p.pos.y);
  }
  for (int o = 0; o < spec.n_outliers; ++o) {
    Point p;
    p.id = next_id++;
    p.pos = {min_x + (max_x - min_x) * uniform01(rng), min_y + (max_y - min_y) * uniform01(rng)};
    p.weight = spec.w_lo + (spec.w_hi - spec.w_lo) * uniform01(rng);
    p.capacity_coeff = p.weight;
    ds.points.push_back(p);
    ds.labels.push_back(kNoiseLabel);
  }

  if (spec.normalize) {
    const double extent = std::max(max_x - min_x, max_y - min_y);
    const double s = extent > 0.0 ? 1.0 / extent : 1.0;
    const Vec2 origin{min_x, min_y};
    for (Point& p : ds.points) p.pos = (p.pos - origin) * s;
    for (Vec2& c : ds.cluster_centers) c = (c - origin) * s;
  }
  return ds;
}

}  // namespace pack
