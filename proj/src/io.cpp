#include "pack/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "pack/error.hpp"

namespace pack {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    rows.push_back({number, split(line)});
  }
  return rows;
}

std::string where(const fs::path& path, std::size_t line, std::size_t col) {
  return path.string() + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_int(const std::string& s) {
  Int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// Column lookup for header-based CSV files.
class Columns {
 public:
  Columns(const fs::path& path, const CsvRow& header) : path_(path) {
    for (std::size_t c = 0; c < header.fields.size(); ++c) index_[lower(header.fields[c])] = c;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    auto c = find(name);
    if (!c) throw Error(ErrorCode::ParseError, path_.string() + ": missing column '" + name + "'");
    return *c;
  }

  std::size_t size() const { return index_.size(); }

 private:
  fs::path path_;
  std::map<std::string, std::size_t> index_;
};

const std::string& field(const CsvRow& row, std::optional<std::size_t> c) {
  static const std::string empty;
  if (!c || *c >= row.fields.size()) return empty;
  return row.fields[*c];
}

double number(const fs::path& path, const CsvRow& row, std::size_t c, bool nonnegative) {
  const std::string& s = field(row, c);
  auto v = to_double(s);
  if (!v || !std::isfinite(*v)) {
    throw Error(ErrorCode::ParseError, where(path, row.line, c + 1) + ": expected a number, got '" + s + "'");
  }
  if (nonnegative && *v < 0.0) {
    throw Error(ErrorCode::NegativeValue, where(path, row.line, c + 1) + ": negative value " + s);
  }
  return *v;
}

void check_width(const fs::path& path, const CsvRow& row, std::size_t width) {
  if (row.fields.size() > width) {
    throw Error(ErrorCode::ParseError, where(path, row.line, width + 1) + ": more fields than header columns");
  }
}

ordered_json location_json(const Problem& problem, const Location& loc) {
  ordered_json j;
  const bool has_coords =
      problem.centers.placement == Placement::Continuous || !problem.centers.candidates.empty();
  if (has_coords) {
    j["x"] = loc.pos.x;
    j["y"] = loc.pos.y;
  }
  if (loc.is_site()) j["site"] = loc.site;
  return j;
}

Location location_from_json(const json& j) {
  Location loc;
  if (j.contains("x")) loc.pos = {j.at("x").get<double>(), j.at("y").get<double>()};
  if (j.contains("site")) loc.site = j.at("site").get<std::ptrdiff_t>();
  return loc;
}

double nan_if_null(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::vector<Point> load_points(const fs::path& path, bool require_coords) {
  const std::vector<CsvRow> rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const Columns cols(path, rows.front());
  const std::size_t c_id = cols.require("id");
  const std::size_t c_w = cols.require("w");
  const auto c_x = require_coords ? std::optional(cols.require("x")) : cols.find("x");
  const auto c_y = require_coords ? std::optional(cols.require("y")) : cols.find("y");
  const auto c_gamma = cols.find("gamma");
  const auto c_a = cols.find("a");
  const auto c_q = cols.find("q");
  const auto c_pseudo = cols.find("pseudo");

  std::vector<Point> points;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    check_width(path, row, cols.size());
    Point p;
    auto id = to_int<std::int64_t>(field(row, c_id));
    if (!id) throw Error(ErrorCode::ParseError, where(path, row.line, c_id + 1) + ": expected an integer id");
    p.id = *id;
    const bool has_x = !field(row, c_x).empty();
    const bool has_y = !field(row, c_y).empty();
    if (has_x != has_y || (require_coords && !has_x)) {
      const std::size_t c = (!has_x && c_x) ? *c_x : c_y.value_or(0);
      throw Error(ErrorCode::ParseError, where(path, row.line, c + 1) + ": missing coordinate");
    }
    p.has_coords = has_x;
    if (has_x) p.pos = {number(path, row, *c_x, false), number(path, row, *c_y, false)};
    p.weight = number(path, row, c_w, true);
    const std::string& pseudo = field(row, c_pseudo);
    if (!pseudo.empty()) {
      const std::string v = lower(pseudo);
      if (v == "1" || v == "true") {
        p.pseudo = true;
      } else if (v != "0" && v != "false") {
        throw Error(ErrorCode::ParseError, where(path, row.line, *c_pseudo + 1) + ": expected 0/1 for pseudo");
      }
    }
    p.preference = field(row, c_gamma).empty() ? 0.0 : number(path, row, *c_gamma, true);
    p.capacity_coeff =
        field(row, c_a).empty() ? (p.pseudo ? 0.0 : p.weight) : number(path, row, *c_a, true);
    if (!field(row, c_q).empty()) {
      auto q = to_int<int>(field(row, c_q));
      if (!q || *q < 1) {
        throw Error(ErrorCode::ParseError, where(path, row.line, *c_q + 1) + ": q must be a positive integer");
      }
      p.coverage = *q;
    }
    points.push_back(p);
  }
  return points;
}

std::vector<Vec2> load_candidates(const fs::path& path) {
  const std::vector<CsvRow> rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const Columns cols(path, rows.front());
  const std::size_t cx = cols.require("x"), cy = cols.require("y");
  std::vector<Vec2> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_width(path, rows[r], cols.size());
    out.push_back({number(path, rows[r], cx, false), number(path, rows[r], cy, false)});
  }
  return out;
}

Matrix load_matrix(const fs::path& path) {
  std::vector<CsvRow> rows = read_csv(path);
  if (!rows.empty() && !to_double(rows.front().fields.front())) rows.erase(rows.begin());
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no matrix rows");
  const std::size_t width = rows.front().fields.size();
  Matrix d(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].fields.size() != width) {
      throw Error(ErrorCode::RaggedMatrix, where(path, rows[r].line, 1) + ": row has " +
                                               std::to_string(rows[r].fields.size()) +
                                               " columns, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) d(r, c) = number(path, rows[r], c, true);
  }
  return d;
}

std::vector<Location> load_fixed(const fs::path& path) {
  const std::vector<CsvRow> rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const Columns cols(path, rows.front());
  const auto c_site = cols.find("site");
  const auto c_x = cols.find("x");
  const auto c_y = cols.find("y");
  if (!c_site && !(c_x && c_y)) {
    throw Error(ErrorCode::ParseError, path.string() + ": need a site column or x and y columns");
  }
  std::vector<Location> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    check_width(path, row, cols.size());
    Location loc;
    if (c_site && !field(row, c_site).empty()) {
      auto s = to_int<std::ptrdiff_t>(field(row, c_site));
      if (!s || *s < 0) {
        throw Error(ErrorCode::ParseError, where(path, row.line, *c_site + 1) + ": bad site index");
      }
      loc.site = *s;
    }
    if (c_x && c_y && !field(row, c_x).empty()) {
      loc.pos = {number(path, row, *c_x, false), number(path, row, *c_y, false)};
    }
    out.push_back(loc);
  }
  return out;
}

std::map<std::int64_t, long> load_labels(const fs::path& path) {
  const std::vector<CsvRow> rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  const Columns cols(path, rows.front());
  const std::size_t c_id = cols.require("id"), c_label = cols.require("label");
  std::map<std::int64_t, long> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto id = to_int<std::int64_t>(field(rows[r], c_id));
    auto label = to_int<long>(field(rows[r], c_label));
    if (!id || !label) {
      throw Error(ErrorCode::ParseError, where(path, rows[r].line, (id ? c_label : c_id) + 1) + ": expected an integer");
    }
    out[*id] = *label;
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_points(const fs::path& path, const std::vector<Point>& points,
                  const std::vector<long>* labels) {
  std::ostringstream os;
  os.precision(17);
  os << "id,x,y,w,gamma,a,q,pseudo" << (labels ? ",label" : "") << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    os << p.id << ',';
    if (p.has_coords) os << p.pos.x << ',' << p.pos.y;
    else os << ',';
    os << ',' << p.weight << ',' << p.preference << ',' << p.capacity_coeff << ',' << p.coverage
       << ',' << (p.pseudo ? 1 : 0);
    if (labels) os << ',' << (*labels)[i];
    os << '\n';
  }
  write_text(path, os.str());
}

ordered_json gen_spec_to_json(const GenSpec& s) {
  ordered_json j;
  j["cluster_sizes"] = s.cluster_sizes;
  j["shape_range"] = {s.shape_lo, s.shape_hi};
  j["scale_range"] = {s.scale_lo, s.scale_hi};
  j["rho_range"] = {s.rho_lo, s.rho_hi};
  j["grid_side_sd"] = s.grid_side_sd;
  j["shrink"] = s.shrink;
  j["weight_range"] = {s.w_lo, s.w_hi};
  j["edge_heavy_fraction"] = s.edge_heavy_fraction;
  j["n_outliers"] = s.n_outliers;
  j["normalize"] = s.normalize;
  j["seed"] = s.seed;
  return j;
}

GenSpec gen_spec_from_json(const json& j) {
  GenSpec s;
  auto range = [&](const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto& r = j.at(key);
    if (!r.is_array() || r.size() != 2) {
      throw Error(ErrorCode::ParseError, std::string(key) + " must be a two-element array");
    }
    lo = r[0].get<double>();
    hi = r[1].get<double>();
  };
  try {
    if (j.contains("cluster_sizes")) s.cluster_sizes = j.at("cluster_sizes").get<std::vector<int>>();
    range("shape_range", s.shape_lo, s.shape_hi);
    range("scale_range", s.scale_lo, s.scale_hi);
    range("rho_range", s.rho_lo, s.rho_hi);
    range("weight_range", s.w_lo, s.w_hi);
    s.grid_side_sd = j.value("grid_side_sd", s.grid_side_sd);
    s.shrink = j.value("shrink", s.shrink);
    s.edge_heavy_fraction = j.value("edge_heavy_fraction", s.edge_heavy_fraction);
    s.n_outliers = j.value("n_outliers", s.n_outliers);
    s.normalize = j.value("normalize", s.normalize);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("generator spec: ") + e.what());
  }
  validate_gen_spec(s);
  return s;
}

GenSpec load_gen_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return gen_spec_from_json(j);
}

ordered_json solution_to_json(const Problem& problem, const Solution& solution) {
  const Assignment& y = solution.assignment;
  ordered_json doc;
  doc["schema"] = kSolutionSchema;
  doc["metric"] = problem.metric.name();
  doc["placement"] = problem.centers.placement == Placement::Discrete ? "discrete" : "continuous";
  doc["membership"] = y.mode() == Membership::Hard ? "hard" : "fractional";
  doc["n"] = y.n();
  doc["k"] = y.k();
  doc["has_outlier_column"] = y.has_outlier();

  ordered_json centers = ordered_json::array();
  for (std::size_t j = 0; j < solution.centers.size(); ++j) {
    ordered_json c = location_json(problem, solution.centers[j]);
    c["index"] = j;
    c["fixed"] = j < problem.m();
    centers.push_back(std::move(c));
  }
  doc["centers"] = std::move(centers);

  ordered_json released = ordered_json::array();
  for (std::size_t l : solution.released) {
    ordered_json r;
    r["fixed_index"] = l;
    r["original"] = location_json(problem, problem.centers.fixed[l]);
    r["location"] = location_json(problem, solution.centers[l]);
    released.push_back(std::move(r));
  }
  doc["released"] = std::move(released);

  ordered_json memberships = ordered_json::array();
  ordered_json outliers = ordered_json::array();
  ordered_json points = ordered_json::array();
  for (std::size_t i = 0; i < y.n(); ++i) {
    const Point& p = problem.points[i];
    double share = 0.0, dist = 0.0;
    for (int j = 0; j < y.k(); ++j) {
      const double v = y.at(i, j);
      if (v == 0.0) continue;
      memberships.push_back({{"point", p.id}, {"center", j}, {"y", v}});
      share += v;
      dist += v * distance(problem.metric, i, p.pos, solution.centers[j]);
    }
    if (y.outlier(i) != 0.0) outliers.push_back({{"point", p.id}, {"y", y.outlier(i)}});
    ordered_json pj;
    pj["id"] = p.id;
    pj["w"] = p.weight;
    if (p.pseudo) pj["pseudo"] = true;
    if (share > 0.0) pj["distance"] = dist / share;
    else pj["distance"] = nullptr;
    points.push_back(std::move(pj));
  }
  doc["points"] = std::move(points);
  doc["memberships"] = std::move(memberships);
  doc["outliers"] = std::move(outliers);

  const ObjectiveBreakdown& ob = solution.objective;
  doc["objective"] = {{"distance", ob.distance_term}, {"outlier", ob.outlier_term},
                      {"opening", ob.opening_term},   {"release", ob.release_term},
                      {"total", ob.total}};
  ordered_json loads = ordered_json::array();
  for (int j = 0; j < y.k(); ++j) loads.push_back(y.load(problem.points, j));
  doc["loads"] = std::move(loads);

  const SolveDiagnostics& d = solution.diagnostics;
  doc["diagnostics"] = {{"iterations", d.iterations},
                        {"restarts", d.restarts},
                        {"best_restart", d.best_restart},
                        {"weiszfeld_cap_hits", d.weiszfeld_cap_hits},
                        {"reseeded_centers", d.reseeded_centers},
                        {"allocation_proven_optimal", d.allocation_proven_optimal},
                        {"allocation_gap", d.allocation_gap},
                        {"budget_exhausted", d.budget_exhausted},
                        {"integral_fast_path", d.integral_fast_path},
                        {"outlier_absorbed_coverage", d.outlier_absorbed_coverage}};
  return doc;
}

StoredSolution solution_from_json(const json& doc) {
  try {
    if (doc.at("schema").get<std::string>() != kSolutionSchema) {
      throw Error(ErrorCode::ParseError, "unsupported solution schema " + doc.at("schema").dump());
    }
    StoredSolution out;
    out.metric = doc.at("metric").get<std::string>();
    const auto n = doc.at("n").get<std::size_t>();
    const int k = doc.at("k").get<int>();
    const Membership mode =
        doc.at("membership").get<std::string>() == "hard" ? Membership::Hard : Membership::Fractional;
    Solution& s = out.solution;
    s.assignment = Assignment(n, k, doc.at("has_outlier_column").get<bool>(), mode);

    for (const auto& c : doc.at("centers")) s.centers.push_back(location_from_json(c));
    for (const auto& r : doc.at("released")) s.released.push_back(r.at("fixed_index").get<std::size_t>());

    std::map<std::int64_t, std::size_t> row_of;
    for (const auto& p : doc.at("points")) {
      row_of[p.at("id").get<std::int64_t>()] = out.point_ids.size();
      out.point_ids.push_back(p.at("id").get<std::int64_t>());
      out.point_weights.push_back(p.at("w").get<double>());
      out.point_pseudo.push_back(p.value("pseudo", false));
      out.point_distances.push_back(nan_if_null(p.at("distance")));
    }
    if (out.point_ids.size() != n) throw Error(ErrorCode::ParseError, "point list does not match n");
    for (const auto& m : doc.at("memberships")) {
      s.assignment.at(row_of.at(m.at("point").get<std::int64_t>()), m.at("center").get<int>()) =
          m.at("y").get<double>();
    }
    for (const auto& o : doc.at("outliers")) {
      s.assignment.set_outlier(row_of.at(o.at("point").get<std::int64_t>()), o.at("y").get<double>());
    }
    const auto& ob = doc.at("objective");
    s.objective = {ob.at("distance").get<double>(), ob.at("outlier").get<double>(),
                   ob.at("opening").get<double>(), ob.at("release").get<double>(),
                   ob.at("total").get<double>()};
    out.loads = doc.at("loads").get<std::vector<double>>();

    const auto& d = doc.at("diagnostics");
    SolveDiagnostics& diag = s.diagnostics;
    diag.iterations = d.at("iterations").get<int>();
    diag.restarts = d.at("restarts").get<int>();
    diag.best_restart = d.at("best_restart").get<int>();
    diag.weiszfeld_cap_hits = d.at("weiszfeld_cap_hits").get<int>();
    diag.reseeded_centers = d.at("reseeded_centers").get<int>();
    diag.allocation_proven_optimal = d.at("allocation_proven_optimal").get<bool>();
    diag.allocation_gap = d.at("allocation_gap").get<double>();
    diag.budget_exhausted = d.at("budget_exhausted").get<bool>();
    diag.integral_fast_path = d.at("integral_fast_path").get<bool>();
    diag.outlier_absorbed_coverage = d.at("outlier_absorbed_coverage").get<bool>();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("solution document: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw Error(ErrorCode::ParseError, std::string("solution document: unknown point id"));
  }
}

void write_solution(const Problem& problem, const Solution& solution, const fs::path& path) {
  write_text(path, solution_to_json(problem, solution).dump(2) + "\n");
}

StoredSolution read_solution(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return solution_from_json(doc);
}

}  // namespace pack
