// memtp: maximum-entropy transport plans from the command line.
//
// Exit codes: 0 success, 1 input error, 2 the solve did not converge
// (boundary data, infeasible data or iteration limit), 3 a verify suite failed.

#include "memtp/io.hpp"
#include "memtp/verify.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace {

using memtp::io::json;
namespace fs = std::filesystem;

enum class LogLevel { Error, Info, Debug };
LogLevel g_log_level = LogLevel::Info;

template <typename... Args>
void log(LogLevel level, fmt::format_string<Args...> format, Args&&... args) {
  if (level > g_log_level) return;
  static constexpr const char* tags[] = {"error", "info", "debug"};
  fmt::print(stderr, "[{}] {}\n", tags[static_cast<int>(level)], fmt::format(format, std::forward<Args>(args)...));
}

void configure_logging() {
  const char* env = std::getenv("TRANSPORT_LOG");
  if (!env) return;
  const std::string v = env;
  if (v == "error")
    g_log_level = LogLevel::Error;
  else if (v == "info")
    g_log_level = LogLevel::Info;
  else if (v == "debug")
    g_log_level = LogLevel::Debug;
  else
    log(LogLevel::Error, "TRANSPORT_LOG={} not recognised; expected error, info or debug", v);
}

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitVerify = 3;

struct GlobalOptions {
  std::string out;
  std::uint64_t seed = memtp::verify::VerifyConfig{}.seed;
  std::optional<double> tol_grad, tol_feas, tau_max;
  double delta = 1e-2;
  bool bisect = false;
  std::string format;
};

struct ProblemOptions {
  std::string file;
  std::string p_csv, q_csv, w_csv;
  std::optional<double> cost;
};

struct Run {
  std::string command;
  GlobalOptions global;
  ProblemOptions problem;
  // distance / interpolate
  std::vector<std::string> inputs;
  int points = 101;
  // sweep
  std::optional<double> c_start;
  int max_steps = 100000;
  // verify
  std::vector<std::string> suites;
  std::optional<std::size_t> samples;
  double grid = 1e-3;
  std::vector<std::string> argv;
};

memtp::SolverOptions solver_options(const GlobalOptions& g) {
  memtp::SolverOptions o;
  if (g.tol_grad) o.grad_tol = *g.tol_grad;
  if (g.tol_feas) o.feas_tol = *g.tol_feas;
  o.tau_max = g.tau_max;
  return o;
}

memtp::TransportProblem load_problem(const ProblemOptions& o) {
  memtp::TransportProblem problem;
  if (!o.file.empty()) {
    problem = memtp::io::load_problem(o.file);
  } else {
    if (o.p_csv.empty() || o.q_csv.empty())
      throw memtp::io::InputError("<flags>", {"give a problem file or both --p and --q"});
    const memtp::Vector p = memtp::io::read_csv_vector(o.p_csv);
    const memtp::Vector q = memtp::io::read_csv_vector(o.q_csv);
    if (p.size() != q.size())
      throw memtp::io::InputError("<flags>", {fmt::format("--p has {} entries, --q has {}", p.size(), q.size())});
    problem = memtp::TransportProblem::make(p, q);
  }
  if (!o.w_csv.empty()) {
    const memtp::Matrix w = memtp::io::read_csv_matrix(o.w_csv);
    if (w.rows() != problem.side || w.cols() != problem.side)
      throw memtp::io::InputError(o.w_csv, {fmt::format("expected a {0} x {0} matrix, got {1} x {2}", problem.side,
                                                        w.rows(), w.cols())});
    problem.cost = w;
  }
  if (o.cost) problem.cost_target = o.cost;
  const auto violations = memtp::validate_problem(problem);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    for (const auto& v : violations) messages.push_back(v.message);
    throw memtp::io::InputError(o.file.empty() ? "<flags>" : o.file, messages);
  }
  return problem;
}

std::string resolved_format(const Run& run, const char* fallback) {
  return run.global.format.empty() ? fallback : run.global.format;
}

std::string output_path(const Run& run, const std::string& format) {
  return run.global.out.empty() ? fmt::format("memtp-{}.{}", run.command, format) : run.global.out;
}

void write_output(const std::string& path, const std::string& content) {
  memtp::io::write_atomic(path, content);
  log(LogLevel::Info, "wrote {}", path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_manifest(const Run& run, const std::string& out, int exit_code) {
  const auto& g = run.global;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json config = {{"command", run.command},
                 {"out", out},
                 {"seed", g.seed},
                 {"tol_grad", opt(g.tol_grad)},
                 {"tol_feas", opt(g.tol_feas)},
                 {"tau_max", opt(g.tau_max)},
                 {"delta", g.delta},
                 {"bisect", g.bisect},
                 {"format", g.format},
                 {"problem_file", run.problem.file},
                 {"p_csv", run.problem.p_csv},
                 {"q_csv", run.problem.q_csv},
                 {"W_csv", run.problem.w_csv},
                 {"cost", opt(run.problem.cost)},
                 {"inputs", run.inputs},
                 {"points", run.points},
                 {"c_start", opt(run.c_start)},
                 {"max_steps", run.max_steps},
                 {"suites", run.suites},
                 {"samples", run.samples ? json(*run.samples) : json(nullptr)},
                 {"grid", run.grid}};
  const auto now = std::chrono::system_clock::now();
  json manifest = {{"config", config},
                   {"argv", run.argv},
                   {"exit_code", exit_code},
                   {"versions",
                    {{"memtp", MEMTP_VERSION},
                     {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                     {"fmt", FMT_VERSION},
                     {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                                   NLOHMANN_JSON_VERSION_PATCH)},
                     {"cli11", CLI11_VERSION},
                     {"openmp", _OPENMP}}},
                   {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", std::chrono::floor<std::chrono::seconds>(now))}};
  memtp::io::write_atomic(out + ".manifest.json", dump(manifest));
}

// ---- commands --------------------------------------------------------------

int cmd_solve(const Run& run, std::string& out) {
  const memtp::TransportProblem problem = load_problem(run.problem);
  const auto options = solver_options(run.global);
  const memtp::SolveOutcome outcome = memtp::solve_maxent(problem, options);
  log(LogLevel::Info, "status {} after {} iterations", memtp::to_string(outcome.status), outcome.iterations);
  if (!outcome.message.empty()) log(LogLevel::Debug, "{}", outcome.message);
  const std::string format = resolved_format(run, "json");
  out = output_path(run, format);
  write_output(out, format == "csv" ? memtp::io::solve_csv(problem, outcome)
                                    : dump(memtp::io::solve_report(problem, outcome)));
  return outcome.converged() ? kExitOk : kExitNotConverged;
}

bool oracle_applies(const memtp::TransportProblem& problem) {
  return problem.extra.empty() && (problem.bounds.lower.array() == 0.0).all() &&
         (problem.bounds.upper.array() == 1.0).all();
}

int cmd_sweep(const Run& run, std::string& out) {
  const memtp::TransportProblem problem = load_problem(run.problem);
  memtp::SweepConfig config;
  config.delta = run.global.delta;
  config.c_start = run.c_start;
  config.solver = solver_options(run.global);
  config.max_steps = run.max_steps;
  config.bisect = run.global.bisect;
  const std::string format = resolved_format(run, "json");
  out = output_path(run, format);
  memtp::SweepResult sweep;
  try {
    sweep = memtp::run_sweep(problem, config);
  } catch (const memtp::SweepError& e) {
    log(LogLevel::Error, "{}", e.what());
    return kExitNotConverged;
  }
  std::optional<memtp::GapReport> gap;
  if (oracle_applies(problem)) {
    gap = memtp::gap_report(sweep, memtp::lp_oracle(problem), config.solver.feas_tol);
    log(LogLevel::Info, "c* = {:.17g}, oracle cost = {:.17g}, gap = {:.3e}", sweep.c_star, gap->oracle_cost, gap->gap);
  } else {
    log(LogLevel::Info, "c* = {:.17g} (oracle skipped: non-unit boxes or extra constraints)", sweep.c_star);
  }
  write_output(out, format == "csv" ? memtp::io::sweep_trace_csv(sweep)
                                    : dump(memtp::io::sweep_report(problem, sweep, gap)));
  return kExitOk;
}

int cmd_oracle(const Run& run, std::string& out) {
  const memtp::TransportProblem problem = load_problem(run.problem);
  if (!problem.has_cost_matrix()) throw memtp::io::InputError("<input>", {"W: the oracle needs a cost matrix"});
  const memtp::LpSolution lp = memtp::lp_oracle(problem);
  log(LogLevel::Info, "minimal cost {:.17g} after {} pivots", lp.cost, lp.pivots);
  const std::string format = resolved_format(run, "json");
  out = output_path(run, format);
  write_output(out, format == "csv" ? memtp::io::lp_csv(problem, lp) : dump(memtp::io::lp_report(problem, lp)));
  return kExitOk;
}

// Two plans (and their exponents) for distance and interpolate.
struct PlanPair {
  memtp::GeometryContext ctx;
  int side;
  memtp::Vector x[2];
  memtp::Vector tau[2];
};

PlanPair load_plan_pair(const Run& run) {
  if (run.inputs.size() != 2) throw memtp::io::InputError("<flags>", {"expected exactly two plan files"});
  std::optional<memtp::TransportProblem> problem;
  if (!run.problem.file.empty() || !run.problem.p_csv.empty()) problem = load_problem(run.problem);
  memtp::io::PlanInput in[2] = {memtp::io::load_plan_input(run.inputs[0]), memtp::io::load_plan_input(run.inputs[1])};

  Eigen::Index cells = problem ? problem->cells() : 0;
  for (int s = 0; s < 2; ++s) {
    if (in[s].x) {
      if (cells == 0) cells = in[s].x->size();
      if (in[s].x->size() != cells)
        throw memtp::io::InputError(run.inputs[static_cast<std::size_t>(s)],
                                    {fmt::format("x: expected {} entries, got {}", cells, in[s].x->size())});
    } else if (!problem) {
      throw memtp::io::InputError(run.inputs[static_cast<std::size_t>(s)],
                                  {"lambda: multipliers need the problem (--problem)"});
    }
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells))));
  if (Eigen::Index(side) * side != cells)
    throw memtp::io::InputError(run.inputs[0], {fmt::format("x: {} entries is not a square grid", cells)});
  memtp::BoxBounds bounds = problem ? problem->bounds : memtp::BoxBounds::uniform(cells);
  if (problem) memtp::eliminate_zero_marginals(*problem, bounds);
  for (Eigen::Index k = 0; k < cells; ++k)
    if (bounds.degenerate(k))
      throw memtp::io::InputError("<input>", {fmt::format("cell {} has a degenerate box; distances need a_n < b_n", k + 1)});
  PlanPair pair{memtp::GeometryContext(bounds), side, {}, {}};

  for (int s = 0; s < 2; ++s) {
    const auto& source = run.inputs[static_cast<std::size_t>(s)];
    if (in[s].lambda && problem) {
      // Multipliers map to exponents through the constraint matrix they were solved with.
      std::optional<memtp::AugmentedSystem> system;
      for (const auto& candidate :
           {memtp::augment_constraints(*problem, std::nullopt),
            memtp::augment_constraints(*problem, problem->has_cost_matrix() ? std::optional<double>(0.0) : std::nullopt)})
        if (candidate.rows() == in[s].lambda->size()) system = candidate;
      if (!system)
        throw memtp::io::InputError(source, {fmt::format("lambda: {} entries do not match the problem's constraints",
                                                         in[s].lambda->size())});
      pair.tau[s] = system->apply_transpose(*in[s].lambda);
      pair.x[s] = pair.ctx.xi_of(pair.tau[s]);
    } else {
      try {
        pair.tau[s] = pair.ctx.tau_of(*in[s].x);
      } catch (const std::domain_error& e) {
        throw memtp::io::InputError(source, {e.what()});
      }
      pair.x[s] = *in[s].x;
    }
  }
  return pair;
}

int cmd_distance(const Run& run, std::string& out) {
  const PlanPair pair = load_plan_pair(run);
  memtp::DistanceRecord record = memtp::distance_record(pair.x[0], pair.x[1], pair.ctx);
  log(LogLevel::Info, "d_M = {:.17g}, d_G = {:.17g}", record.d_M, record.d_G);
  const std::string format = resolved_format(run, "json");
  out = output_path(run, format);
  write_output(out, format == "csv" ? memtp::io::distance_csv(record) : dump(memtp::io::distance_json(record)));
  return kExitOk;
}

int cmd_interpolate(const Run& run, std::string& out) {
  if (run.points < 2) throw memtp::io::InputError("<flags>", {"--points must be at least 2"});
  const PlanPair pair = load_plan_pair(run);
  std::vector<double> ts;
  std::vector<memtp::Vector> plans;
  for (int m = 0; m < run.points; ++m) {
    const double t = static_cast<double>(m) / (run.points - 1);
    ts.push_back(t);
    if (m == 0)
      plans.push_back(pair.x[0]);
    else if (m == run.points - 1)
      plans.push_back(pair.x[1]);
    else
      plans.push_back(pair.ctx.xi_of(memtp::geodesic_tau(pair.tau[0], pair.tau[1], t, pair.ctx)));
  }
  const std::string format = resolved_format(run, "csv");
  out = output_path(run, format);
  write_output(out, format == "json" ? dump(memtp::io::interpolation_json(ts, plans, pair.side))
                                     : memtp::io::interpolation_csv(ts, plans));
  return kExitOk;
}

int cmd_verify(const Run& run, std::string& out) {
  memtp::verify::VerifyConfig config;
  config.seed = run.global.seed;
  config.samples = run.samples;
  config.grid = run.grid;
  const auto suites = run.suites.empty() ? memtp::verify::suite_names() : run.suites;
  std::vector<memtp::verify::SuiteReport> reports;
  bool passed = true;
  for (const auto& name : suites) {
    log(LogLevel::Info, "suite {}", name);
    reports.push_back(memtp::verify::run_suite(name, config));
    const auto& r = reports.back();
    log(r.passed() ? LogLevel::Info : LogLevel::Error, "suite {}: {} cases, {} failures", name, r.cases, r.failures);
    for (const auto& f : r.failing_cases) log(LogLevel::Error, "  {}: {}", name, f);
    passed = passed && r.passed();
  }

  const std::string format = resolved_format(run, "json");
  out = output_path(run, format);
  if (format == "csv") {
    std::string csv = "suite,key,value\n";
    for (const auto& r : reports) {
      csv += fmt::format("{},seed,{}\n{},cases,{}\n{},failures,{}\n", r.name, r.seed, r.name, r.cases, r.name, r.failures);
      for (const auto& [k, v] : r.metrics) csv += fmt::format("{},{},{}\n", r.name, k, memtp::io::format_double(v));
      for (const auto& f : r.failing_cases) csv += fmt::format("{},failing_case,\"{}\"\n", r.name, f);
    }
    write_output(out, csv);
  } else {
    json doc = {{"seed", config.seed}, {"passed", passed}, {"suites", json::array()}};
    for (const auto& r : reports) {
      json metrics = json::object();
      for (const auto& [k, v] : r.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
      json s = {{"name", r.name},         {"seed", r.seed},       {"cases", r.cases},
                {"failures", r.failures}, {"passed", r.passed()}, {"metrics", metrics},
                {"failing_cases", r.failing_cases}};
      if (r.table) s["table"] = {{"columns", r.table->columns}, {"rows", r.table->rows}};
      doc["suites"].push_back(std::move(s));
    }
    write_output(out, dump(doc));
  }
  return passed ? kExitOk : kExitVerify;
}

void add_problem_options(CLI::App* cmd, ProblemOptions& o, bool positional) {
  if (positional)
    cmd->add_option("problem", o.file, "Problem JSON file")->check(CLI::ExistingFile);
  else
    cmd->add_option("--problem", o.file, "Problem JSON file (boxes and constraints)")->check(CLI::ExistingFile);
  cmd->add_option("--p", o.p_csv, "Row marginals as CSV")->check(CLI::ExistingFile);
  cmd->add_option("--q", o.q_csv, "Column marginals as CSV")->check(CLI::ExistingFile);
  cmd->add_option("--W", o.w_csv, "Cost matrix as CSV (N rows of N values)")->check(CLI::ExistingFile);
  cmd->add_option("--cost", o.cost, "Expected cost constraint <W, x> = c");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  Run run;
  run.argv.assign(argv, argv + argc);

  CLI::App app{"Maximum-entropy transport plans with box bounds"};
  app.set_version_flag("--version", MEMTP_VERSION);
  app.require_subcommand(1);
  auto& g = run.global;
  app.add_option("--out", g.out, "Output file (default memtp-<command>.<format>)");
  app.add_option("--seed", g.seed, "Seed for the verify suites");
  app.add_option("--tol-grad", g.tol_grad, "Dual gradient tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-feas", g.tol_feas, "Constraint residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--delta", g.delta, "Sweep cost step")->check(CLI::PositiveNumber);
  app.add_option("--tau-max", g.tau_max, "Exponent magnitude treated as divergence")->check(CLI::PositiveNumber);
  app.add_flag("--bisect", g.bisect, "Refine the sweep's last feasible cost by bisection");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* solve = app.add_subcommand("solve", "Solve the maximum-entropy problem");
  add_problem_options(solve, run.problem, true);
  auto* sweep = app.add_subcommand("sweep", "Decreasing-cost sweep towards the minimal cost");
  add_problem_options(sweep, run.problem, true);
  sweep->add_option("--c-start", run.c_start, "First cost level (default: cost of the product plan)");
  sweep->add_option("--max-steps", run.max_steps, "Step budget")->check(CLI::PositiveNumber);
  auto* oracle = app.add_subcommand("oracle", "Exact minimal-cost plan by the transportation simplex");
  add_problem_options(oracle, run.problem, true);
  auto* distance = app.add_subcommand("distance", "Geodesic distances between two plans");
  add_problem_options(distance, run.problem, false);
  distance->add_option("plans", run.inputs, "Two plan or multiplier files")->expected(2)->required();
  auto* interpolate = app.add_subcommand("interpolate", "Plans along the geodesic between two plans");
  add_problem_options(interpolate, run.problem, false);
  interpolate->add_option("plans", run.inputs, "Two plan or multiplier files")->expected(2)->required();
  interpolate->add_option("--points", run.points, "Number of t-grid points");
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--suite", run.suites, "Suite to run (repeatable; default all)")
      ->check(CLI::IsMember(memtp::verify::suite_names()));
  verify->add_option("--samples", run.samples, "Sample count override")->check(CLI::PositiveNumber);
  verify->add_option("--grid", run.grid, "Grid step for the geodesic equation check")->check(CLI::Range(1e-5, 0.1));
  for (auto* cmd : {solve, sweep, oracle, distance, interpolate, verify}) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  run.command = app.get_subcommands().front()->get_name();

  std::string out;
  int code = kExitOk;
  try {
    if (run.command == "solve")
      code = cmd_solve(run, out);
    else if (run.command == "sweep")
      code = cmd_sweep(run, out);
    else if (run.command == "oracle")
      code = cmd_oracle(run, out);
    else if (run.command == "distance")
      code = cmd_distance(run, out);
    else if (run.command == "interpolate")
      code = cmd_interpolate(run, out);
    else
      code = cmd_verify(run, out);
  } catch (const memtp::io::InputError& e) {
    log(LogLevel::Error, "invalid input in {}", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    log(LogLevel::Error, "{}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    log(LogLevel::Error, "{}", e.what());
    return kExitInput;
  }
  if (!out.empty()) write_manifest(run, out, code);
  return code;
}
