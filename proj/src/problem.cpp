#include "memtp/problem.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace memtp {

int lex_index(int i, int j, int side) {
  if (side < 1) throw std::out_of_range("grid side must be positive");
  if (i < 1 || i > side || j < 1 || j > side)
    throw std::out_of_range(fmt::format("cell ({}, {}) outside 1..{}", i, j, side));
  return (i - 1) * side + j;
}

std::pair<int, int> unlex_index(int n, int side) {
  if (side < 1) throw std::out_of_range("grid side must be positive");
  if (n < 1 || n > side * side)
    throw std::out_of_range(fmt::format("index {} outside 1..{}", n, side * side));
  const int k = n / side;
  const int r = n % side;
  if (r == 0) return {k, side};
  return {k + 1, r};
}

BoxBounds BoxBounds::uniform(Eigen::Index size, double lo, double hi) {
  return {Vector::Constant(size, lo), Vector::Constant(size, hi)};
}

double BoxBounds::min_width() const {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < size(); ++k)
    if (!degenerate(k)) m = std::min(m, width(k));
  return m;
}

double BoxBounds::max_width() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < size(); ++k) m = std::max(m, width(k));
  return m;
}

TransportProblem TransportProblem::make(Vector p, Vector q, Matrix cost) {
  TransportProblem problem;
  problem.side = static_cast<int>(p.size());
  problem.p = std::move(p);
  problem.q = std::move(q);
  problem.cost = std::move(cost);
  problem.bounds = BoxBounds::uniform(problem.cells());
  return problem;
}

Vector TransportProblem::cost_row() const {
  if (!has_cost_matrix()) throw std::logic_error("problem has no cost matrix");
  return flatten(cost);
}

Vector flatten(const Matrix& m) {
  Vector out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

Matrix unflatten(const Vector& x, int side) {
  if (x.size() != Eigen::Index(side) * side)
    throw std::invalid_argument(fmt::format("vector of length {} is not {}x{}", x.size(), side, side));
  Matrix m(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) m(i, j) = x[Eigen::Index(i) * side + j];
  return m;
}

std::vector<Violation> validate_problem(const TransportProblem& problem) {
  std::vector<Violation> out;
  auto add = [&](std::string code, std::string message,
                 std::optional<std::pair<int, int>> cell = std::nullopt) {
    out.push_back({std::move(code), std::move(message), cell});
  };

  const int n = problem.side;
  if (n < 1) {
    add("side", fmt::format("grid side must be positive, got {}", n));
    return out;
  }

  auto check_marginal = [&](const Vector& m, const char* name) -> std::optional<double> {
    if (m.size() != n) {
      add(fmt::format("{}_size", name[0] == 'r' ? "p" : "q"),
          fmt::format("{} marginal has length {}, expected {}", name, m.size(), n));
      return std::nullopt;
    }
    bool finite = true;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!std::isfinite(m[i])) {
        finite = false;
        add("nonfinite", fmt::format("{} marginal entry {} is not finite", name, i + 1));
      } else if (m[i] < 0.0) {
        add("negative", fmt::format("{} marginal entry {} is negative ({:.10g})", name, i + 1, m[i]));
      }
    }
    if (!finite) return std::nullopt;
    const double s = m.sum();
    if (std::abs(s - 1.0) > kMarginalTolerance)
      add("normalization", fmt::format("{} marginal sums to {:.10g}", name, s));
    return s;
  };
  const auto sp = check_marginal(problem.p, "row");
  const auto sq = check_marginal(problem.q, "column");
  if (sp && sq && std::abs(*sp - *sq) > kMarginalTolerance)
    add("mass_mismatch", fmt::format("row and column marginals differ in mass ({:.10g} vs {:.10g})", *sp, *sq));

  if (problem.has_cost_matrix()) {
    if (problem.cost.rows() != n || problem.cost.cols() != n) {
      add("cost_shape", fmt::format("cost matrix is {}x{}, expected {}x{}", problem.cost.rows(),
                                    problem.cost.cols(), n, n));
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double w = problem.cost(i, j);
          if (!std::isfinite(w) || w < 0.0)
            add("cost_value", fmt::format("cost at cell ({}, {}) is {:.10g}; must be finite and >= 0", i + 1, j + 1, w),
                std::pair{i + 1, j + 1});
        }
    }
  }
  if (problem.cost_target) {
    if (!problem.has_cost_matrix()) add("cost_target", "cost target given without a cost matrix");
    if (!std::isfinite(*problem.cost_target)) add("cost_target", "cost target is not finite");
  }

  const BoxBounds& b = problem.bounds;
  if (b.lower.size() != problem.cells() || b.upper.size() != problem.cells()) {
    add("bounds_size", fmt::format("bounds have {} entries, expected {}", b.lower.size(), problem.cells()));
  } else {
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      const auto cell = unlex_index(static_cast<int>(k + 1), n);
      if (!std::isfinite(b.lower[k]) || !std::isfinite(b.upper[k]))
        add("bounds_value", fmt::format("bounds at cell ({}, {}) are not finite", cell.first, cell.second), cell);
      else if (b.lower[k] > b.upper[k])
        add("bounds_order",
            fmt::format("bounds at cell ({}, {}) have a > b ({:.10g} > {:.10g})", cell.first, cell.second,
                        b.lower[k], b.upper[k]),
            cell);
    }
  }

  for (std::size_t e = 0; e < problem.extra.size(); ++e) {
    const auto& c = problem.extra[e];
    if (c.v.size() != problem.cells())
      add("extra_size", fmt::format("extra constraint {} has length {}, expected {}", e + 1, c.v.size(), problem.cells()));
    else if (!c.v.allFinite() || !std::isfinite(c.value))
      add("extra_value", fmt::format("extra constraint {} has non-finite entries", e + 1));
  }
  return out;
}

Matrix build_marginal_constraints(int side) {
  if (side < 1) throw std::invalid_argument("grid side must be positive");
  if (side > kMaxDenseSide)
    throw std::invalid_argument(fmt::format("dense constraint matrix limited to N <= {}", kMaxDenseSide));
  const Eigen::Index n = side;
  Matrix c = Matrix::Zero(2 * n, n * n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    for (Eigen::Index j = 1; j <= n; ++j) {
      c(k - 1, (k - 1) * n + j - 1) = 1.0;      // row sum i = k
      c(n + k - 1, k + (j - 1) * n - 1) = 1.0;  // column sum j = k
    }
  }
  return c;
}

AugmentedSystem::AugmentedSystem(int side, Vector p, Vector q, std::optional<Vector> cost_row,
                                 std::optional<double> cost_value,
                                 std::vector<ExpectationConstraint> extra)
    : side_(side) {
  if (side < 1) throw std::invalid_argument("grid side must be positive");
  const Eigen::Index cells = cols();
  if (p.size() != side || q.size() != side)
    throw std::invalid_argument("marginal length does not match grid side");
  if (cost_row.has_value() != cost_value.has_value())
    throw std::invalid_argument("cost row and cost value must be given together");
  if (cost_row) {
    if (cost_row->size() != cells) throw std::invalid_argument("cost row length does not match N^2");
    cost_row_.assign(cost_row->data(), cost_row->data() + cells);
  }
  extra_rows_.resize(Eigen::Index(extra.size()), cells);
  for (std::size_t e = 0; e < extra.size(); ++e) {
    if (extra[e].v.size() != cells)
      throw std::invalid_argument("extra constraint length does not match N^2");
    extra_rows_.row(Eigen::Index(e)) = extra[e].v.transpose();
  }
  y_.resize(rows());
  y_.head(side) = p;
  y_.segment(side, side) = q;
  Eigen::Index r = 2 * Eigen::Index(side);
  if (cost_value) y_[r++] = *cost_value;
  for (const auto& c : extra) y_[r++] = c.value;
}

Eigen::Index AugmentedSystem::cost_row_index() const {
  if (!has_cost_row()) throw std::logic_error("system has no cost row");
  return 2 * Eigen::Index(side_);
}

AugmentedSystem AugmentedSystem::with_cost(double c) const {
  AugmentedSystem copy = *this;
  copy.y_[cost_row_index()] = c;
  return copy;
}

ConstraintView AugmentedSystem::view() const {
  ConstraintView v;
  v.side = side_;
  v.cost = std::span<const double>(cost_row_);
  v.extra = extra_rows_.rows() > 0 ? &extra_rows_ : nullptr;
  return v;
}

Vector AugmentedSystem::apply(const Vector& x, ExecPolicy policy) const {
  Vector out;
  kernels::forward_product(view(), x, out, policy);
  return out;
}

Vector AugmentedSystem::apply_transpose(const Vector& lambda, ExecPolicy policy) const {
  Vector tau;
  kernels::transpose_product(view(), lambda, tau, policy);
  return tau;
}

Matrix AugmentedSystem::weighted_gram(const Vector& w, ExecPolicy policy) const {
  Matrix h;
  kernels::weighted_gram(view(), w, h, policy);
  return h;
}

Matrix AugmentedSystem::dense() const {
  const Eigen::Index n = side_;
  Matrix a = Matrix::Zero(rows(), cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, i * n + j) = 1.0;
      a(n + j, i * n + j) = 1.0;
    }
  Eigen::Index r = 2 * n;
  if (has_cost_row()) {
    for (Eigen::Index k = 0; k < cols(); ++k) a(r, k) = cost_row_[static_cast<std::size_t>(k)];
    ++r;
  }
  for (Eigen::Index e = 0; e < extra_rows_.rows(); ++e) a.row(r++) = extra_rows_.row(e);
  return a;
}

AugmentedSystem augment_constraints(const TransportProblem& problem, std::optional<double> cost) {
  std::optional<Vector> row;
  if (cost) row = problem.cost_row();
  return AugmentedSystem(problem.side, problem.p, problem.q, std::move(row), cost, problem.extra);
}

double initial_cost(const Vector& p, const Vector& q, const Matrix& cost) {
  if (cost.rows() != p.size() || cost.cols() != q.size())
    throw std::invalid_argument("cost matrix shape does not match marginals");
  return p.dot(cost * q);
}

Vector product_plan(const Vector& p, const Vector& q) {
  return flatten(p * q.transpose());
}

}  // namespace memtp
