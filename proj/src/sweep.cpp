#include "memtp/sweep.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace memtp {

double max_pin_distance(const Vector& x, const BoxBounds& bounds, double radius) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (bounds.degenerate(k)) continue;
    const double d = std::min(x[k] - bounds.lower[k], bounds.upper[k] - x[k]);
    if (d <= radius) worst = std::max(worst, d);
  }
  return worst;
}

SweepResult run_sweep(const TransportProblem& problem, const SweepConfig& config) {
  if (!(config.delta > 0.0) || !std::isfinite(config.delta))
    throw std::invalid_argument("sweep step delta must be positive");
  if (!problem.has_cost_matrix()) throw std::invalid_argument("sweep needs a cost matrix");
  const auto violations = validate_problem(problem);
  if (!violations.empty()) {
    std::string message = "invalid problem:";
    for (const auto& v : violations) message += "\n  " + v.message;
    throw std::invalid_argument(message);
  }

  SweepResult result;
  result.delta = config.delta;
  result.c0 = initial_cost(problem.p, problem.q, problem.cost);
  const double c_start = config.c_start.value_or(result.c0);

  BoxBounds bounds = problem.bounds;
  result.eliminated_cells = eliminate_zero_marginals(problem, bounds);
  const AugmentedSystem base = augment_constraints(problem, c_start);
  const Vector cost_row = problem.cost_row();
  const double pin_radius = 10.0 * config.delta;

  auto record = [&](int step, double c, const SolveOutcome& out) {
    SweepStep s;
    s.step = step;
    s.c = c;
    s.status = out.status;
    s.achieved_cost = cost_row.dot(out.last_x);
    s.iterations = out.iterations;
    s.grad_norm = out.last.gradient_norm;
    s.entropy = out.solution ? out.solution->entropy : std::numeric_limits<double>::quiet_NaN();
    s.max_pin_distance = max_pin_distance(out.last_x, bounds, pin_radius);
    return s;
  };

  SolveOutcome first = solve_dual(base, bounds, config.solver);
  result.trace.push_back(record(0, c_start, first));
  if (!first.converged())
    throw SweepError(fmt::format("initial solve at c = {:.17g} ended with status {}: {}", c_start,
                                 to_string(first.status), first.message));
  result.solution = *first.solution;
  result.n_star = 0;
  result.c_star = c_start;

  for (int n = 1;; ++n) {
    if (n > config.max_steps)
      throw SweepError(fmt::format("sweep exceeded {} steps without reaching the boundary", config.max_steps));
    const double c = c_start - n * config.delta;
    const SolveOutcome out = solve_dual(base.with_cost(c), bounds, config.solver, &result.solution.lambda);
    result.trace.push_back(record(n, c, out));
    if (!out.converged()) break;
    result.solution = *out.solution;
    result.n_star = n;
    result.c_star = c;
  }

  if (config.bisect) {
    double lo = result.c_star - config.delta, hi = result.c_star;
    int step = result.n_star;
    while (hi - lo > config.delta / 100.0) {
      const double mid = 0.5 * (lo + hi);
      const SolveOutcome out = solve_dual(base.with_cost(mid), bounds, config.solver, &result.solution.lambda);
      result.refinement.push_back(record(++step, mid, out));
      if (out.converged()) {
        hi = mid;
        result.solution = *out.solution;
      } else {
        lo = mid;
      }
    }
    result.c_star = hi;
  }
  return result;
}

GapReport gap_report(const SweepResult& sweep, const LpSolution& lp, double feas_tol) {
  GapReport r;
  r.c_star = sweep.c_star;
  r.oracle_cost = lp.cost;
  r.gap = sweep.c_star - lp.cost;
  r.delta = sweep.delta;
  r.tolerance = feas_tol;
  r.within = r.gap >= -feas_tol && r.gap <= sweep.delta + feas_tol;
  r.plan_sup_distance = sweep.plan().size() == lp.x.size() ? (sweep.plan() - lp.x).lpNorm<Eigen::Infinity>()
                                                            : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace memtp
