#pragma once

#include "memtp/problem.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memtp {

enum class SolveStatus { Converged, Boundary, Infeasible, IterationLimit };
enum class Pin { Interior, Lower, Upper };

std::string_view to_string(SolveStatus status);
std::string_view to_string(Pin pin);

struct SolverOptions {
  double grad_tol = 1e-10;  // on the range component of the dual gradient, inf-norm
  double feas_tol = 1e-8;   // on ||A x - y||_inf
  int max_iterations = 500;
  /// Exponent magnitude that signals a diverging dual; default 200 / min width.
  std::optional<double> tau_max;
  /// Converged also requires the Newton step in scaled exponent space
  /// max_n |(b_n - a_n) dtau_n| to fall below this.
  double step_tol = 1e-6;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  /// A cell counts as pinned when its distance to a bound, relative to the
  /// box width, is below this.
  double pin_tol = 1e-8;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct DualState {
  Vector lambda;
  Vector tau;  // always A^t lambda for the stored lambda
  double objective = 0.0;
  double gradient_norm = 0.0;
};

struct MaxentSolution {
  Vector lambda;
  Vector tau;
  Vector x;
  double dual_value = 0.0;
  double entropy = 0.0;
  double residual = 0.0;  // ||A x - y||_inf
  double gradient_norm = 0.0;
  int iterations = 0;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::IterationLimit;
  std::optional<MaxentSolution> solution;  // set only when Converged
  std::vector<Pin> pins;                   // filled for Boundary and Infeasible
  DualState last;                          // final iterate, any status
  Vector last_x;                           // primal image of the final iterate
  int iterations = 0;
  int eliminated_cells = 0;  // cells fixed at 0 because a marginal is 0
  std::string message;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// ln Z(lambda) = sum_n ln(e^{-a_n tau_n} + e^{-b_n tau_n}), tau = A^t lambda.
double log_partition(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                     ExecPolicy policy = ExecPolicy::Parallel);

/// Sigma(lambda, y) = ln Z(lambda) + <lambda, y>.
double dual_objective(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                      ExecPolicy policy = ExecPolicy::Parallel);

/// y - A xi(A^t lambda).
Vector dual_gradient(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                     ExecPolicy policy = ExecPolicy::Parallel);

/// A diag(M''(tau)) A^t.
Matrix dual_hessian(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                    ExecPolicy policy = ExecPolicy::Parallel);

/// x_n = a_n + (b_n - a_n) / (1 + e^{(b_n - a_n) tau_n}), tau = A^t lambda.
Vector primal_from_dual(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                        ExecPolicy policy = ExecPolicy::Parallel);

/// Entropy of the product Bernoulli law with mean x relative to the two-point
/// reference measure. Degenerate cells contribute 0. Throws std::domain_error
/// when x leaves the box.
double entropy_of_plan(const Vector& x, const BoxBounds& bounds);

/// Kullback divergence between the product laws with means x1 and x2.
/// Returns +inf when x2 sits on a bound that x1 does not.
double kullback_divergence(const Vector& x1, const Vector& x2, const BoxBounds& bounds);

/// Pin classification from the exponents: Lower when (b-a) tau is large and
/// positive, Upper when large and negative.
std::vector<Pin> classify_pins(const Vector& tau, const BoxBounds& bounds, double pin_tol);

/// Damped Newton on Sigma. `initial_lambda` defaults to 0 (the midpoint plan).
SolveOutcome solve_dual(const AugmentedSystem& system, const BoxBounds& bounds,
                        const SolverOptions& options = {},
                        const Vector* initial_lambda = nullptr);

/// Validates, eliminates zero-marginal rows/columns, assembles A and y(c),
/// and runs solve_dual. Throws std::invalid_argument on invalid input.
SolveOutcome solve_maxent(const TransportProblem& problem, const SolverOptions& options = {},
                          const Vector* initial_lambda = nullptr);

/// Bounds after forcing cells of zero-marginal rows and columns to 0.
/// Returns the number of cells fixed. Throws if such a cell cannot be 0.
int eliminate_zero_marginals(const TransportProblem& problem, BoxBounds& bounds);

}  // namespace memtp
