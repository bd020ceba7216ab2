#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "pack/datagen.hpp"
#include "pack/problem.hpp"

namespace pack {

namespace fs = std::filesystem;

inline constexpr const char* kSolutionSchema = "pack-solution/1";

// Points CSV with a header naming the columns id, x, y, w and optionally
// gamma, a, q, pseudo.  Empty gamma / a / q cells default to 0 / w / 1 (a
// defaults to 0 for pseudo-points).  When `require_coords` is false, x and y
// may be missing or empty.
std::vector<Point> load_points(const fs::path& path, bool require_coords = true);

// Candidate sites: CSV with x and y columns.
std::vector<Vec2> load_candidates(const fs::path& path);

// Distance matrix: one row per point, one column per site, no header.
Matrix load_matrix(const fs::path& path);

// Fixed centers: CSV with either x, y columns or a site column.
std::vector<Location> load_fixed(const fs::path& path);

// Ground-truth labels keyed by point id, from a CSV with id and label columns.
std::map<std::int64_t, long> load_labels(const fs::path& path);

// Points CSV in the load_points layout, with a trailing label column when
// labels are given.
void write_points(const fs::path& path, const std::vector<Point>& points,
                  const std::vector<long>* labels = nullptr);

nlohmann::ordered_json gen_spec_to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const nlohmann::json& j);
GenSpec load_gen_spec(const fs::path& path);

// Solution document content as read back from disk.
struct StoredSolution {
  std::string metric;
  Solution solution;
  std::vector<std::int64_t> point_ids;
  std::vector<double> point_weights;
  std::vector<bool> point_pseudo;
  // Membership-weighted distance of each point to its center(s); NaN for
  // full outliers.
  std::vector<double> point_distances;
  std::vector<double> loads;
};

nlohmann::ordered_json solution_to_json(const Problem& problem, const Solution& solution);
StoredSolution solution_from_json(const nlohmann::json& doc);

// Structured solution document (JSON).  Output is a pure function of its
// inputs; wall-clock timing is not part of it.
void write_solution(const Problem& problem, const Solution& solution, const fs::path& path);
StoredSolution read_solution(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);

}  // namespace pack
