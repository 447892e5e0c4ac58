#include "memtp/dual_solver.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace memtp {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::Boundary: return "Boundary";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

std::string_view to_string(Pin pin) {
  switch (pin) {
    case Pin::Interior: return "interior";
    case Pin::Lower: return "lower";
    case Pin::Upper: return "upper";
  }
  return "?";
}

namespace {

void check_sizes(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds) {
  if (lambda.size() != system.rows())
    throw std::invalid_argument(fmt::format("multiplier vector has length {}, expected {}", lambda.size(), system.rows()));
  if (bounds.size() != system.cols())
    throw std::invalid_argument(fmt::format("bounds have length {}, expected {}", bounds.size(), system.cols()));
}

struct Evaluation {
  Vector tau;
  Vector x;
  Vector gradient;  // y - A x
  double objective = 0.0;
};

// Sigma and its derivatives over a fixed system, plus the null space of A^t
// restricted to the free (non-degenerate) cells.
class DualFunction {
 public:
  DualFunction(const AugmentedSystem& system, const BoxBounds& bounds, ExecPolicy policy)
      : system_(system), bounds_(bounds), policy_(policy) {
    Vector free_mask(system.cols());
    for (Eigen::Index k = 0; k < free_mask.size(); ++k) free_mask[k] = bounds.degenerate(k) ? 0.0 : 1.0;
    const Matrix gram = system.weighted_gram(free_mask, policy);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector& values = eig.eigenvalues();
    const double scale = std::max(values.cwiseAbs().maxCoeff(), 1.0);
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (values[k] <= 1e-9 * scale) null_cols.push_back(k);
    null_basis_.resize(gram.rows(), Eigen::Index(null_cols.size()));
    for (std::size_t c = 0; c < null_cols.size(); ++c)
      null_basis_.col(Eigen::Index(c)) = eig.eigenvectors().col(null_cols[c]);
  }

  Evaluation evaluate(const Vector& lambda) const {
    Evaluation e;
    e.tau = system_.apply_transpose(lambda, policy_);
    kernels::primal_map(e.tau, bounds_.lower, bounds_.upper, e.x, policy_);
    e.gradient = system_.data() - system_.apply(e.x, policy_);
    e.objective = kernels::log_partition_sum(e.tau, bounds_.lower, bounds_.upper, policy_) +
                  lambda.dot(system_.data());
    return e;
  }

  Matrix hessian(const Vector& tau) const {
    Vector w;
    kernels::variance_map(tau, bounds_.lower, bounds_.upper, w, policy_);
    return system_.weighted_gram(w, policy_);
  }

  /// Removes the component of v in null(A^t).
  Vector project(const Vector& v) const {
    if (null_basis_.cols() == 0) return v;
    return v - null_basis_ * (null_basis_.transpose() * v);
  }

  const Matrix& null_basis() const { return null_basis_; }

  /// max_n |(b_n - a_n) v_n| over free cells.
  double scaled_max(const Vector& v) const {
    double m = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) m = std::max(m, std::abs(bounds_.width(k) * v[k]));
    return m;
  }

  /// max_n |v_n| over free cells.
  double free_max(const Vector& v) const {
    double m = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (!bounds_.degenerate(k)) m = std::max(m, std::abs(v[k]));
    return m;
  }

 private:
  const AugmentedSystem& system_;
  const BoxBounds& bounds_;
  ExecPolicy policy_;
  Matrix null_basis_;
};

// Newton direction -(H + U U^t)^{-1} g with symmetric Jacobi scaling. The
// U U^t term fixes the structural null space without perturbing the range.
std::optional<Vector> newton_direction(const Matrix& hessian, const Matrix& null_basis,
                                       const Vector& gradient) {
  Matrix h = hessian;
  if (null_basis.cols() > 0) h.noalias() += null_basis * null_basis.transpose();
  Vector scale(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double d = h(i, i);
    scale[i] = d > 0.0 && std::isfinite(d) ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Matrix scaled = scale.asDiagonal() * h * scale.asDiagonal();
  Eigen::LDLT<Matrix> ldlt(scaled);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  Vector z = ldlt.solve(-(scale.asDiagonal() * gradient));
  Vector dir = scale.asDiagonal() * z;
  if (!dir.allFinite()) return std::nullopt;
  return dir;
}

}  // namespace

double log_partition(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                     ExecPolicy policy) {
  check_sizes(lambda, system, bounds);
  const Vector tau = system.apply_transpose(lambda, policy);
  return kernels::log_partition_sum(tau, bounds.lower, bounds.upper, policy);
}

double dual_objective(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                      ExecPolicy policy) {
  return log_partition(lambda, system, bounds, policy) + lambda.dot(system.data());
}

Vector dual_gradient(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                     ExecPolicy policy) {
  const Vector x = primal_from_dual(lambda, system, bounds, policy);
  return system.data() - system.apply(x, policy);
}

Matrix dual_hessian(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                    ExecPolicy policy) {
  check_sizes(lambda, system, bounds);
  const Vector tau = system.apply_transpose(lambda, policy);
  Vector w;
  kernels::variance_map(tau, bounds.lower, bounds.upper, w, policy);
  return system.weighted_gram(w, policy);
}

Vector primal_from_dual(const Vector& lambda, const AugmentedSystem& system, const BoxBounds& bounds,
                        ExecPolicy policy) {
  check_sizes(lambda, system, bounds);
  const Vector tau = system.apply_transpose(lambda, policy);
  Vector x;
  kernels::primal_map(tau, bounds.lower, bounds.upper, x, policy);
  return x;
}

namespace {

// Bernoulli weights (p, 1 - p) = ((b - x)/D, (x - a)/D), each computed from
// its own difference so that both stay accurate near the bounds.
std::pair<double, double> bernoulli(double x, double a, double b, Eigen::Index k) {
  const double width = b - a;
  const double slack = 1e-12 * width;
  if (!(x >= a - slack && x <= b + slack))
    throw std::domain_error(fmt::format("plan entry {} = {:.17g} outside [{:.17g}, {:.17g}]", k + 1, x, a, b));
  const double upper_gap = std::clamp(b - x, 0.0, width);
  const double lower_gap = std::clamp(x - a, 0.0, width);
  return {upper_gap / width, lower_gap / width};
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

double entropy_of_plan(const Vector& x, const BoxBounds& bounds) {
  if (x.size() != bounds.size()) throw std::invalid_argument("plan and bounds differ in length");
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (bounds.degenerate(k)) {
      if (x[k] != bounds.lower[k])
        throw std::domain_error(fmt::format("plan entry {} differs from its fixed value", k + 1));
      continue;
    }
    const auto [p, r] = bernoulli(x[k], bounds.lower[k], bounds.upper[k], k);
    s -= xlogx(p) + xlogx(r);
  }
  return s;
}

double kullback_divergence(const Vector& x1, const Vector& x2, const BoxBounds& bounds) {
  if (x1.size() != bounds.size() || x2.size() != bounds.size())
    throw std::invalid_argument("plans and bounds differ in length");
  double total = 0.0;
  for (Eigen::Index k = 0; k < x1.size(); ++k) {
    if (bounds.degenerate(k)) continue;
    const auto [p1, r1] = bernoulli(x1[k], bounds.lower[k], bounds.upper[k], k);
    const auto [p2, r2] = bernoulli(x2[k], bounds.lower[k], bounds.upper[k], k);
    auto term = [](double u, double v) {
      if (u == 0.0) return 0.0;
      if (v == 0.0) return std::numeric_limits<double>::infinity();
      return u * std::log(u / v);
    };
    total += term(p1, p2) + term(r1, r2);
  }
  return std::max(total, 0.0);
}

std::vector<Pin> classify_pins(const Vector& tau, const BoxBounds& bounds, double pin_tol) {
  // Relative distance to the lower bound is 1 / (1 + e^{D tau}).
  const double threshold = std::log(1.0 / pin_tol - 1.0);
  std::vector<Pin> pins(static_cast<std::size_t>(tau.size()), Pin::Interior);
  for (Eigen::Index k = 0; k < tau.size(); ++k) {
    if (bounds.degenerate(k)) continue;
    const double z = bounds.width(k) * tau[k];
    if (z >= threshold)
      pins[static_cast<std::size_t>(k)] = Pin::Lower;
    else if (z <= -threshold)
      pins[static_cast<std::size_t>(k)] = Pin::Upper;
  }
  return pins;
}

SolveOutcome solve_dual(const AugmentedSystem& system, const BoxBounds& bounds,
                        const SolverOptions& options, const Vector* initial_lambda) {
  if (bounds.size() != system.cols())
    throw std::invalid_argument("bounds length does not match the number of cells");
  const DualFunction dual(system, bounds, options.policy);
  const double width_min = bounds.min_width();
  const double tau_max = options.tau_max.value_or(std::isfinite(width_min) ? 200.0 / width_min : 200.0);

  Vector lambda = initial_lambda ? *initial_lambda : Vector::Zero(system.rows());
  if (lambda.size() != system.rows()) throw std::invalid_argument("initial multipliers have the wrong length");
  if (!lambda.allFinite()) throw std::invalid_argument("initial multipliers must be finite");

  SolveOutcome out;
  Evaluation eval = dual.evaluate(lambda);

  auto finish = [&](SolveStatus status, int iterations, std::string message) {
    const Vector range_gradient = dual.project(eval.gradient);
    out.status = status;
    out.iterations = iterations;
    out.message = std::move(message);
    out.last = {lambda, eval.tau, eval.objective, range_gradient.lpNorm<Eigen::Infinity>()};
    out.last_x = eval.x;
    if (status == SolveStatus::Converged) {
      MaxentSolution s;
      s.lambda = lambda;
      s.tau = eval.tau;
      s.x = eval.x;
      s.dual_value = eval.objective;
      s.entropy = entropy_of_plan(eval.x, bounds);
      s.residual = eval.gradient.lpNorm<Eigen::Infinity>();
      s.gradient_norm = out.last.gradient_norm;
      s.iterations = iterations;
      out.solution = std::move(s);
    } else {
      out.pins = classify_pins(eval.tau, bounds, options.pin_tol);
    }
    return out;
  };

  // The null-space component of the gradient does not depend on lambda: it is
  // nonzero exactly when y(c) is outside the range of A.
  if (dual.null_basis().cols() > 0) {
    const double inconsistency = (dual.null_basis().transpose() * eval.gradient).lpNorm<Eigen::Infinity>();
    if (inconsistency > options.feas_tol)
      return finish(SolveStatus::Infeasible, 0,
                    fmt::format("data vector is outside the range of A (null-space component {:.3g})", inconsistency));
  }

  const double pinned_exponent = std::log(1.0 / options.pin_tol - 1.0);
  // Exhausting the budget or stalling with a feasible residual and cells at
  // their bounds is the signature of data on the boundary of A(box).
  auto stalled_status = [&](SolveStatus fallback) {
    const bool feasible = eval.gradient.lpNorm<Eigen::Infinity>() <= options.feas_tol;
    const bool pinned = dual.scaled_max(eval.tau) >= pinned_exponent;
    return feasible && pinned ? SolveStatus::Boundary : fallback;
  };

  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector g = dual.project(eval.gradient);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    const double residual = eval.gradient.lpNorm<Eigen::Infinity>();

    if (dual.free_max(eval.tau) > tau_max) {
      return residual <= options.feas_tol
                 ? finish(SolveStatus::Boundary, it, "exponents diverge with a vanishing residual")
                 : finish(SolveStatus::Infeasible, it,
                          fmt::format("exponents diverge with residual {:.3g}", residual));
    }

    const Matrix hess = dual.hessian(eval.tau);
    std::optional<Vector> newton = newton_direction(hess, dual.null_basis(), g);
    const double newton_step =
        newton ? dual.scaled_max(system.apply_transpose(*newton, options.policy))
               : std::numeric_limits<double>::infinity();

    if (gnorm <= options.grad_tol && residual <= options.feas_tol && newton_step <= options.step_tol)
      return finish(SolveStatus::Converged, it, "");

    auto try_direction = [&](const Vector& dir) -> bool {
      const double slope = eval.gradient.dot(dir);
      if (!(slope < 0.0)) return false;
      double alpha = 1.0;
      for (int b = 0; b < options.max_backtracks; ++b, alpha *= options.backtrack) {
        const Vector trial = lambda + alpha * dir;
        Evaluation next = dual.evaluate(trial);
        if (!std::isfinite(next.objective)) continue;
        // On a convex ray, f'(alpha) <= c slope implies the Armijo decrease;
        // this form stays informative when the objective change is below
        // floating-point resolution.
        const bool armijo = next.objective <= eval.objective + options.armijo_slope * alpha * slope;
        const bool curvature = next.gradient.dot(dir) <= options.armijo_slope * slope;
        if (armijo || curvature) {
          lambda = trial;
          eval = std::move(next);
          return true;
        }
      }
      return false;
    };

    bool moved = newton && try_direction(*newton);
    if (!moved) moved = try_direction(-g);
    if (!moved) {
      if (gnorm <= options.grad_tol && residual <= options.feas_tol &&
          dual.scaled_max(eval.tau) < pinned_exponent)
        return finish(SolveStatus::Converged, it, "line search at floating-point floor");
      const SolveStatus status = stalled_status(SolveStatus::IterationLimit);
      return finish(status, it, "line search stalled");
    }
  }
  return finish(stalled_status(SolveStatus::IterationLimit), options.max_iterations,
                "iteration limit reached");
}

int eliminate_zero_marginals(const TransportProblem& problem, BoxBounds& bounds) {
  int fixed = 0;
  const int n = problem.side;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (problem.p[i] != 0.0 && problem.q[j] != 0.0) continue;
      const Eigen::Index k = Eigen::Index(i) * n + j;
      if (bounds.lower[k] > 0.0 || bounds.upper[k] < 0.0)
        throw std::invalid_argument(
            fmt::format("cell ({}, {}) lies in a zero marginal but its bounds exclude 0", i + 1, j + 1));
      if (!bounds.degenerate(k) || bounds.lower[k] != 0.0) {
        bounds.lower[k] = 0.0;
        bounds.upper[k] = 0.0;
        ++fixed;
      }
    }
  return fixed;
}

SolveOutcome solve_maxent(const TransportProblem& problem, const SolverOptions& options,
                          const Vector* initial_lambda) {
  const auto violations = validate_problem(problem);
  if (!violations.empty()) {
    std::string message = "invalid problem:";
    for (const auto& v : violations) message += "\n  " + v.message;
    throw std::invalid_argument(message);
  }
  BoxBounds bounds = problem.bounds;
  int eliminated = 0;
  try {
    eliminated = eliminate_zero_marginals(problem, bounds);
  } catch (const std::invalid_argument& e) {
    SolveOutcome out;
    out.status = SolveStatus::Infeasible;
    out.message = e.what();
    return out;
  }
  const AugmentedSystem system = augment_constraints(problem, problem.cost_target);
  SolveOutcome out = solve_dual(system, bounds, options, initial_lambda);
  out.eliminated_cells = eliminated;
  return out;
}

}  // namespace memtp
