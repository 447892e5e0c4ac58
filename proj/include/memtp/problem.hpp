#pragma once

#include "memtp/kernels.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memtp {

/// Largest grid side for which the dense (2N) x N^2 marginal matrix is built.
inline constexpr int kMaxDenseSide = 64;

/// Tolerance on |sum p - 1|, |sum q - 1| and |sum p - sum q|.
inline constexpr double kMarginalTolerance = 1e-9;

/// 1-based lexicographic relabeling: (i, j) -> n = (i - 1) N + j.
int lex_index(int i, int j, int side);

/// Inverse of lex_index. For n mod N == 0 the cell is (n / N, N).
std::pair<int, int> unlex_index(int n, int side);

/// Per-cell box [lower_n, upper_n], lexicographic order.
struct BoxBounds {
  Vector lower;
  Vector upper;

  static BoxBounds uniform(Eigen::Index size, double lo = 0.0, double hi = 1.0);

  Eigen::Index size() const { return lower.size(); }
  double width(Eigen::Index k) const { return upper[k] - lower[k]; }
  bool degenerate(Eigen::Index k) const { return upper[k] == lower[k]; }
  /// Smallest width over non-degenerate cells; +inf if all are degenerate.
  double min_width() const;
  double max_width() const;
};

/// E[v . x] = value, with v indexed lexicographically.
struct ExpectationConstraint {
  Vector v;
  double value = 0.0;
};

struct TransportProblem {
  int side = 0;
  Vector p;
  Vector q;
  Matrix cost;  // N x N; empty when no cost data was supplied
  BoxBounds bounds;
  std::vector<ExpectationConstraint> extra;
  std::optional<double> cost_target;

  /// Uniform [0, 1] boxes, no extras, no cost target.
  static TransportProblem make(Vector p, Vector q, Matrix cost = {});

  Eigen::Index cells() const { return Eigen::Index(side) * side; }
  bool has_cost_matrix() const { return cost.size() > 0; }
  /// W flattened in lexicographic order.
  Vector cost_row() const;
};

/// Row-major flattening of an N x N matrix and its inverse.
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& x, int side);

struct Violation {
  std::string code;
  std::string message;
  std::optional<std::pair<int, int>> cell;  // 1-based, when the violation names a cell
};

/// Collects every violated input rule; never throws.
std::vector<Violation> validate_problem(const TransportProblem& problem);

/// Dense marginal constraint matrix C (2N x N^2). Rows 1..N select row sums,
/// rows N+1..2N select column sums. Throws for N < 1 or N > kMaxDenseSide.
Matrix build_marginal_constraints(int side);

/// A = [C; W^t; extra rows] with data y(c) = (p, q, c, extra values). Only the
/// structure is stored; products with A and A^t never form C.
class AugmentedSystem {
 public:
  AugmentedSystem(int side, Vector p, Vector q, std::optional<Vector> cost_row,
                  std::optional<double> cost_value, std::vector<ExpectationConstraint> extra);

  int side() const { return side_; }
  Eigen::Index cols() const { return Eigen::Index(side_) * side_; }
  Eigen::Index rows() const { return view().rows(); }
  bool has_cost_row() const { return !cost_row_.empty(); }
  /// Row index (0-based) of the cost constraint; requires has_cost_row().
  Eigen::Index cost_row_index() const;
  Eigen::Index extra_count() const { return extra_rows_.rows(); }

  const Vector& data() const { return y_; }
  const std::vector<double>& cost_row() const { return cost_row_; }

  /// Same matrix, data vector with the cost entry replaced by c.
  AugmentedSystem with_cost(double c) const;

  Vector apply(const Vector& x, ExecPolicy policy = ExecPolicy::Parallel) const;
  Vector apply_transpose(const Vector& lambda, ExecPolicy policy = ExecPolicy::Parallel) const;
  Matrix weighted_gram(const Vector& w, ExecPolicy policy = ExecPolicy::Parallel) const;
  /// Dense A, for tests and small problems.
  Matrix dense() const;

  ConstraintView view() const;

 private:
  int side_;
  std::vector<double> cost_row_;
  RowMatrix extra_rows_;
  Vector y_;
};

/// Builds A and y(c) from a problem. When `cost` is empty no cost row is
/// added (A = C plus extras).
AugmentedSystem augment_constraints(const TransportProblem& problem,
                                    std::optional<double> cost);

/// c0 = sum_ij p_i q_j W_ij, the cost of the product plan.
double initial_cost(const Vector& p, const Vector& q, const Matrix& cost);

/// Product plan p_i q_j, flattened.
Vector product_plan(const Vector& p, const Vector& q);

}  // namespace memtp
