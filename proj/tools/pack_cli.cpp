// pack_cli: solve, sweep k, generate synthetic data, evaluate solutions.
//
// Exit codes: 0 success, 1 invalid instance or other error, 2 infeasible,
// 3 parse error (input files or command line), 4 search budget exhausted
// (time or node limit; an incumbent is still written when one exists).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pack/datagen.hpp"
#include "pack/error.hpp"
#include "pack/evaluation.hpp"
#include "pack/io.hpp"
#include "pack/model_selection.hpp"
#include "pack/plot.hpp"
#include "pack/solver.hpp"

namespace {

using pack::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitParse = 3;
constexpr int kExitBudget = 4;

struct InstanceArgs {
  std::string points, candidates, matrix, fixed, metric = "sqeuclidean", capacity;
  std::string membership = "hard";
  int k = 0;
  double outlier_lambda = 0.0, opening_lambda = 0.0;
  double release_lambda = pack::kInfinity;
  int restarts = 10, threads = 0, max_iterations = 100;
  long node_limit = 5000;
  std::uint64_t seed = 0;
  double time_budget = pack::kInfinity;
  std::string out;
  CLI::Option* outlier_opt = nullptr;
  CLI::Option* release_opt = nullptr;
};

void add_instance_flags(CLI::App& cmd, InstanceArgs& a, bool need_k) {
  cmd.add_option("--points", a.points, "points CSV (id,x,y,w[,gamma,a,q,pseudo])")->required();
  cmd.add_option("--candidates", a.candidates, "candidate sites CSV (x,y); implies discrete placement");
  cmd.add_option("--matrix", a.matrix, "point-by-site distance matrix CSV");
  auto* k = cmd.add_option("--k", a.k, "number of centers, fixed ones included")->check(CLI::PositiveNumber);
  if (need_k) k->required();
  cmd.add_option("--metric", a.metric, "sqeuclidean|euclidean|manhattan|threshold:A|matrix")
      ->capture_default_str();
  cmd.add_option("--capacity", a.capacity, "capacity window L,U (U may be inf)");
  cmd.add_option("--membership", a.membership, "hard|fractional")
      ->check(CLI::IsMember({"hard", "fractional"}))
      ->capture_default_str();
  a.outlier_opt = cmd.add_option("--outlier-lambda", a.outlier_lambda, "outlier penalty")
                      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--opening-lambda", a.opening_lambda, "cost per opened center")
      ->check(CLI::NonNegativeNumber);
  auto* fixed = cmd.add_option("--fixed", a.fixed, "fixed centers CSV (x,y or site)");
  a.release_opt = cmd.add_option("--release-lambda", a.release_lambda, "cost per released fixed center")
                      ->check(CLI::NonNegativeNumber)
                      ->needs(fixed);
  cmd.add_option("--restarts", a.restarts, "k-means++ restarts")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--seed", a.seed, "master random seed")->capture_default_str();
  cmd.add_option("--time-budget", a.time_budget, "seconds per hard allocation call")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--node-limit", a.node_limit,
                 "branch-and-bound nodes per hard allocation call (0: unlimited)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--threads", a.threads, "worker threads (0: all cores)")->capture_default_str();
  cmd.add_option("--max-iterations", a.max_iterations, "descent iteration cap")->capture_default_str();
  cmd.add_option("--out", a.out, "output directory")->required();
}

double parse_real(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "Inf" || s == "infinity") return pack::kInfinity;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw pack::Error(ErrorCode::ParseError, what + ": cannot parse '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

pack::Problem build_problem(const InstanceArgs& a) {
  pack::Problem p;
  const bool matrix = a.metric == "matrix";
  p.points = pack::load_points(a.points, !matrix);

  if (a.metric == "sqeuclidean") {
    p.metric = pack::MetricSpec::squared_euclidean();
  } else if (a.metric == "euclidean") {
    p.metric = pack::MetricSpec::euclidean();
  } else if (a.metric == "manhattan") {
    p.metric = pack::MetricSpec::manhattan();
  } else if (a.metric.rfind("threshold:", 0) == 0) {
    p.metric = pack::MetricSpec::threshold(parse_real(a.metric.substr(10), "--metric"));
  } else if (matrix) {
    if (a.matrix.empty()) throw pack::Error(ErrorCode::InvalidProblem, "--metric matrix needs --matrix");
    p.metric = pack::MetricSpec::matrix(pack::load_matrix(a.matrix));
  } else {
    throw pack::Error(ErrorCode::ParseError, "--metric: unknown metric '" + a.metric + "'");
  }
  if (!a.matrix.empty() && !matrix) {
    throw pack::Error(ErrorCode::InvalidProblem, "--matrix requires --metric matrix");
  }

  if (!a.candidates.empty()) p.centers.candidates = pack::load_candidates(a.candidates);
  if (matrix || !a.candidates.empty()) p.centers.placement = pack::Placement::Discrete;
  p.centers.k = a.k;
  if (!a.fixed.empty()) p.centers.fixed = pack::load_fixed(a.fixed);
  p.centers.release_lambda = a.release_lambda;

  if (!a.capacity.empty()) {
    const auto parts = split(a.capacity, ',');
    if (parts.size() != 2) throw pack::Error(ErrorCode::ParseError, "--capacity expects L,U");
    p.capacity = pack::CapacityWindow{parse_real(parts[0], "--capacity"), parse_real(parts[1], "--capacity")};
  }
  p.membership = a.membership == "fractional" ? pack::Membership::Fractional : pack::Membership::Hard;
  if (a.outlier_opt->count() > 0) p.outlier_lambda = a.outlier_lambda;
  p.opening_lambda = a.opening_lambda;
  return pack::validate_problem(std::move(p));
}

pack::SolverConfig solver_config(const InstanceArgs& a) {
  pack::SolverConfig c;
  c.restarts = a.restarts;
  c.rng_seed = a.seed;
  c.max_iterations = a.max_iterations;
  c.time_budget = pack::Seconds(a.time_budget);
  c.node_limit = a.node_limit;
  c.threads = a.threads;
  return c;
}

void print_solution_summary(const pack::Problem& problem, const pack::Solution& s) {
  const auto& ob = s.objective;
  std::printf("objective %.10g (distance %.10g, outliers %.10g, opening %.10g, release %.10g)\n",
              ob.total, ob.distance_term, ob.outlier_term, ob.opening_term, ob.release_term);
  for (int j = 0; j < s.assignment.k(); ++j) {
    const pack::Location& c = s.centers[j];
    std::printf("center %d", j);
    if (c.is_site()) std::printf(" site %td", c.site);
    if (problem.metric.is_geometric() || !problem.centers.candidates.empty()) {
      std::printf(" (%.6g, %.6g)", c.pos.x, c.pos.y);
    }
    std::printf(" load %.6g\n", s.assignment.load(problem.points, j));
  }
  std::size_t outliers = 0;
  for (std::size_t i = 0; i < problem.n(); ++i) outliers += s.assignment.outlier(i) > 0.0;
  std::printf("outliers %zu, released %zu, iterations %d, best restart %d\n", outliers,
              s.released.size(), s.diagnostics.iterations, s.diagnostics.best_restart);
  if (s.diagnostics.budget_exhausted) {
    std::printf("warning: search budget exhausted in a hard allocation call; final allocation gap %.3g\n",
                s.diagnostics.allocation_gap);
  }
}

int run_solve(const InstanceArgs& a) {
  const pack::Problem problem = build_problem(a);
  const auto t0 = std::chrono::steady_clock::now();
  const pack::Solution s = pack::solve(problem, solver_config(a));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const pack::fs::path out(a.out);
  pack::fs::create_directories(out);
  pack::write_solution(problem, s, out / "solution.json");
  const std::string svg = pack::render_svg(problem, s);
  if (!svg.empty()) pack::write_text(out / "plot.svg", svg);
  // Timing lives apart from the solution document, which must be reproducible.
  nlohmann::ordered_json run;
  run["wall_seconds"] = wall;
  run["seed"] = a.seed;
  run["restarts"] = a.restarts;
  pack::write_text(out / "run.json", run.dump(2) + "\n");

  print_solution_summary(problem, s);
  return s.diagnostics.budget_exhausted ? kExitBudget : kExitOk;
}

int run_sweep(const InstanceArgs& a, const std::string& k_range, const std::string& lambda_grid) {
  const auto bounds = k_range.find("..");
  if (bounds == std::string::npos) throw pack::Error(ErrorCode::ParseError, "--k-range expects A..B");
  const int k_lo = static_cast<int>(parse_real(k_range.substr(0, bounds), "--k-range"));
  const int k_hi = static_cast<int>(parse_real(k_range.substr(bounds + 2), "--k-range"));
  if (k_lo < 1 || k_hi < k_lo) throw pack::Error(ErrorCode::ParseError, "--k-range: need 1 <= A <= B");
  std::vector<int> ks;
  for (int k = k_lo; k <= k_hi; ++k) ks.push_back(k);
  std::vector<double> lambdas;
  for (const auto& s : split(lambda_grid, ',')) lambdas.push_back(parse_real(s, "--lambda-grid"));

  InstanceArgs base_args = a;
  base_args.k = ks.back();
  const pack::Problem base = build_problem(base_args);
  const pack::SweepReport r = pack::sweep_k(base, ks, lambdas, solver_config(a));

  const pack::fs::path out(a.out);
  pack::fs::create_directories(out);
  nlohmann::ordered_json doc;
  doc["k"] = r.k_values;
  nlohmann::ordered_json base_json = nlohmann::ordered_json::array();
  for (double v : r.base_objectives) {
    if (std::isfinite(v)) base_json.push_back(v);
    else base_json.push_back(nullptr);
  }
  doc["base_objective"] = base_json;
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const auto& c : r.penalized) curves.push_back({{"lambda", c.lambda}, {"argmin_k", c.argmin_k}});
  doc["penalized"] = curves;
  doc["consensus_k"] = r.consensus_k;
  doc["errors"] = r.errors;
  pack::write_text(out / "sweep.json", doc.dump(2) + "\n");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!r.solutions[i]) continue;
    pack::Problem pk = base;
    pk.centers.k = ks[i];
    pk.opening_lambda = 0.0;
    pack::write_solution(pk, *r.solutions[i], out / ("solution_k" + std::to_string(ks[i]) + ".json"));
  }

  std::printf("%4s %18s %18s\n", "k", "base objective", "first difference");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::printf("%4d %18.10g", ks[i], r.base_objectives[i]);
    if (i + 1 < ks.size()) std::printf(" %18.10g", r.first_differences[i]);
    if (!r.errors[i].empty()) std::printf("  (%s)", r.errors[i].c_str());
    std::printf("\n");
  }
  for (const auto& c : r.penalized) std::printf("lambda %.6g -> k = %d\n", c.lambda, c.argmin_k);
  std::printf("consensus k = %d\n", r.consensus_k);
  return kExitOk;
}

int run_generate(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
  pack::GenSpec spec = spec_path.empty() ? pack::GenSpec{} : pack::load_gen_spec(spec_path);
  spec.seed = seed;
  const pack::Dataset d = pack::generate_dataset(spec);
  pack::write_points(out, d.points, &d.labels);
  std::printf("wrote %zu points (%zu clusters) to %s\n", d.points.size(), d.clusters.size(), out.c_str());
  return kExitOk;
}

void print_summary(const char* name, const pack::DistanceSummary& s) {
  std::printf("distance %-10s mean %.6g  median %.6g  q95 %.6g  (n = %zu)\n", name, s.mean, s.median,
              s.q95, s.count);
}

int run_evaluate(const std::string& solution_path, const std::string& truth_path) {
  const pack::StoredSolution stored = pack::read_solution(solution_path);
  const std::vector<long> found = pack::hardened_labels(stored.solution.assignment);

  std::vector<double> dist, weight;
  for (std::size_t i = 0; i < stored.point_ids.size(); ++i) {
    if (stored.point_pseudo[i] || std::isnan(stored.point_distances[i])) continue;
    dist.push_back(stored.point_distances[i]);
    weight.push_back(stored.point_weights[i]);
  }

  if (!truth_path.empty()) {
    const auto truth = pack::load_labels(truth_path);
    std::vector<long> a, b;
    std::size_t missing = 0;
    for (std::size_t i = 0; i < stored.point_ids.size(); ++i) {
      if (stored.point_pseudo[i]) continue;
      auto it = truth.find(stored.point_ids[i]);
      if (it == truth.end()) {
        ++missing;
        continue;
      }
      a.push_back(it->second);
      b.push_back(found[i]);
    }
    if (missing > 0) std::fprintf(stderr, "warning: %zu points have no ground-truth label\n", missing);
    std::printf("ARI %.10f (n = %zu)\n", pack::adjusted_rand_index(a, b), a.size());
  }
  print_summary("per-point", pack::summarize(dist, weight, pack::SummaryWeighting::PerPoint));
  print_summary("per-demand", pack::summarize(dist, weight, pack::SummaryWeighting::PerDemand));
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible:
    case ErrorCode::AllRestartsInfeasible: return kExitInfeasible;
    case ErrorCode::ParseError:
    case ErrorCode::NegativeValue:
    case ErrorCode::RaggedMatrix: return kExitParse;
    case ErrorCode::NoIncumbentWithinBudget: return kExitBudget;
    default: return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacitated constrained clustering and location-allocation"};
  app.set_config("--config", "", "TOML/INI file; [solve] / [sweep] sections hold subcommand flags");
  app.require_subcommand(1);

  InstanceArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  add_instance_flags(*solve_cmd, solve_args, true);

  InstanceArgs sweep_args;
  std::string k_range, lambda_grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "solve for a range of k and overlay opening costs");
  add_instance_flags(*sweep_cmd, sweep_args, false);
  sweep_cmd->add_option("--k-range", k_range, "A..B")->required();
  sweep_cmd->add_option("--lambda-grid", lambda_grid, "comma-separated opening costs")->required();

  std::string spec_path, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "generate a gamma-copula cluster dataset");
  gen_cmd->add_option("--spec", spec_path, "generator spec JSON (defaults when omitted)");
  gen_cmd->add_option("--seed", gen_seed, "random seed")->required();
  gen_cmd->add_option("--out", gen_out, "output points CSV")->required();

  std::string solution_path, truth_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "ARI and distance summaries of a solution");
  eval_cmd->add_option("--solution", solution_path, "solution.json")->required();
  eval_cmd->add_option("--truth", truth_path, "CSV with id,label columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*solve_cmd) return run_solve(solve_args);
    if (*sweep_cmd) return run_sweep(sweep_args, k_range, lambda_grid);
    if (*gen_cmd) return run_generate(spec_path, gen_seed, gen_out);
    if (*eval_cmd) return run_evaluate(solution_path, truth_path);
  } catch (const pack::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
