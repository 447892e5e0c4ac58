#pragma once

#include "memtp/dual_solver.hpp"
#include "memtp/lp_oracle.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace memtp {

struct SweepConfig {
  double delta = 1e-2;
  std::optional<double> c_start;  // defaults to c0 = sum p_i q_j W_ij
  SolverOptions solver;
  int max_steps = 100000;
  bool bisect = false;
};

struct SweepStep {
  int step = 0;
  double c = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  double achieved_cost = 0.0;  // <W, x> of the iterate
  int iterations = 0;
  double grad_norm = 0.0;
  double entropy = 0.0;           // NaN when the solve did not converge
  double max_pin_distance = 0.0;  // see max_pin_distance()
};

struct SweepResult {
  double c0 = 0.0;
  double delta = 0.0;
  std::vector<SweepStep> trace;       // Converged through n_star, then one failure
  std::vector<SweepStep> refinement;  // bisection solves, when enabled
  int n_star = 0;
  double c_star = 0.0;
  MaxentSolution solution;  // the delta-minimal plan and its multipliers
  int eliminated_cells = 0;

  const Vector& plan() const { return solution.x; }
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest distance to the nearest bound among cells within `radius` of a
/// bound (0 when there are none).
double max_pin_distance(const Vector& x, const BoxBounds& bounds, double radius);

/// Decreasing-cost sweep c_n = c_start - n delta, each solve warm-started from
/// the previous multipliers, stopping at the first solve that does not
/// converge. Throws SweepError when the initial solve fails or max_steps
/// is exhausted, std::invalid_argument for invalid input.
SweepResult run_sweep(const TransportProblem& problem, const SweepConfig& config);

struct GapReport {
  double c_star = 0.0;
  double oracle_cost = 0.0;
  double gap = 0.0;  // c_star - oracle cost
  double delta = 0.0;
  double tolerance = 0.0;
  bool within = false;  // gap in [-tolerance, delta + tolerance]
  double plan_sup_distance = 0.0;
};

GapReport gap_report(const SweepResult& sweep, const LpSolution& lp, double feas_tol = 1e-8);

}  // namespace memtp
