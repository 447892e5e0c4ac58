#include "memtp/kernels.hpp"

#include <stdexcept>
#include <vector>

namespace memtp::kernels {
namespace {

// Below this many cells the OpenMP regions stay inactive.
constexpr Eigen::Index kParallelThreshold = 4096;
constexpr Eigen::Index kBlock = 2048;

template <class F>
double blocked_sum(Eigen::Index n, F&& term) {
  const Eigen::Index blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * kBlock;
    const Eigen::Index hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (Eigen::Index k = lo; k < hi; ++k) s += term(k);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void check_shapes(const ConstraintView& view) {
  if (!view.cost.empty() && Eigen::Index(view.cost.size()) != view.cells())
    throw std::invalid_argument("cost row length does not match N^2");
  if (view.extra && view.extra->cols() != view.cells())
    throw std::invalid_argument("extra constraint rows must have N^2 columns");
}

// Value of A at (row r, cell k) for rows past the marginal block.
double extra_entry(const ConstraintView& view, Eigen::Index r, Eigen::Index k) {
  const Eigen::Index base = 2 * Eigen::Index(view.side);
  if (!view.cost.empty()) {
    if (r == base) return view.cost[static_cast<std::size_t>(k)];
    return (*view.extra)(r - base - 1, k);
  }
  return (*view.extra)(r - base, k);
}

namespace serial {

void transpose_product(const ConstraintView& view, const Vector& lambda, Vector& tau) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  tau.resize(view.cells());
  for (Eigen::Index k = 0; k < view.cells(); ++k) {
    const Eigen::Index i = k / n, j = k % n;
    double t = lambda[i] + lambda[n + j];
    for (Eigen::Index r = 2 * n; r < rows; ++r) t += lambda[r] * extra_entry(view, r, k);
    tau[k] = t;
  }
}

void forward_product(const ConstraintView& view, const Vector& x, Vector& out) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  out.setZero(rows);
  for (Eigen::Index k = 0; k < view.cells(); ++k) {
    const Eigen::Index i = k / n, j = k % n;
    out[i] += x[k];
    out[n + j] += x[k];
    for (Eigen::Index r = 2 * n; r < rows; ++r) out[r] += extra_entry(view, r, k) * x[k];
  }
}

// Rank-one accumulation of w_k a_k a_k^t, one column of A at a time.
void weighted_gram(const ConstraintView& view, const Vector& w, Matrix& out) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  out.setZero(rows, rows);
  std::vector<std::pair<Eigen::Index, double>> column;
  for (Eigen::Index k = 0; k < view.cells(); ++k) {
    column.clear();
    column.emplace_back(k / n, 1.0);
    column.emplace_back(n + k % n, 1.0);
    for (Eigen::Index r = 2 * n; r < rows; ++r) column.emplace_back(r, extra_entry(view, r, k));
    for (const auto& [r1, v1] : column)
      for (const auto& [r2, v2] : column) out(r1, r2) += w[k] * v1 * v2;
  }
}

}  // namespace serial

namespace parallel {

// Pointer to the dense values of extra row r (cost row first), or nullptr.
const double* extra_row(const ConstraintView& view, Eigen::Index r) {
  const Eigen::Index base = 2 * Eigen::Index(view.side);
  if (!view.cost.empty()) {
    if (r == base) return view.cost.data();
    return view.extra->data() + (r - base - 1) * view.cells();
  }
  return view.extra->data() + (r - base) * view.cells();
}

void transpose_product(const ConstraintView& view, const Vector& lambda, Vector& tau) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  const Eigen::Index cells = view.cells();
  tau.resize(cells);
  std::vector<const double*> dense;
  for (Eigen::Index r = 2 * n; r < rows; ++r) dense.push_back(extra_row(view, r));
#pragma omp parallel for schedule(static) if (cells >= kParallelThreshold)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index k = i * n + j;
      double t = lambda[i] + lambda[n + j];
      for (std::size_t e = 0; e < dense.size(); ++e) t += lambda[2 * n + Eigen::Index(e)] * dense[e][k];
      tau[k] = t;
    }
  }
}

void forward_product(const ConstraintView& view, const Vector& x, Vector& out) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  const Eigen::Index cells = view.cells();
  out.resize(rows);
  const bool active = cells >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (active)
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += x[i * n + j];
    out[i] = s;
  }
#pragma omp parallel for schedule(static) if (active)
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i * n + j];
    out[n + j] = s;
  }
  for (Eigen::Index r = 2 * n; r < rows; ++r) {
    const double* v = extra_row(view, r);
    out[r] = blocked_sum(cells, [&](Eigen::Index k) { return v[k] * x[k]; });
  }
}

void weighted_gram(const ConstraintView& view, const Vector& w, Matrix& out) {
  const int n = view.side;
  const Eigen::Index rows = view.rows();
  const Eigen::Index cells = view.cells();
  const bool active = cells >= kParallelThreshold;
  out.setZero(rows, rows);

  // Marginal block: diagonal row/column sums of w plus the off-diagonal
  // row-column coupling H(i, N + j) = w_ij.
#pragma omp parallel for schedule(static) if (active)
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wk = w[i * n + j];
      s += wk;
      out(i, n + j) = wk;
      out(n + j, i) = wk;
    }
    out(i, i) = s;
  }
#pragma omp parallel for schedule(static) if (active)
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += w[i * n + j];
    out(n + j, n + j) = s;
  }

  for (Eigen::Index r = 2 * n; r < rows; ++r) {
    const double* v = extra_row(view, r);
#pragma omp parallel for schedule(static) if (active)
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += w[i * n + j] * v[i * n + j];
      out(r, i) = s;
      out(i, r) = s;
    }
#pragma omp parallel for schedule(static) if (active)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) s += w[i * n + j] * v[i * n + j];
      out(r, n + j) = s;
      out(n + j, r) = s;
    }
    for (Eigen::Index r2 = 2 * n; r2 <= r; ++r2) {
      const double* v2 = extra_row(view, r2);
      const double s = blocked_sum(cells, [&](Eigen::Index k) { return w[k] * v[k] * v2[k]; });
      out(r, r2) = s;
      out(r2, r) = s;
    }
  }
}

}  // namespace parallel
}  // namespace

void transpose_product(const ConstraintView& view, const Vector& lambda, Vector& tau,
                       ExecPolicy policy) {
  check_shapes(view);
  if (lambda.size() != view.rows())
    throw std::invalid_argument("multiplier vector length does not match rows of A");
  if (policy == ExecPolicy::Serial)
    serial::transpose_product(view, lambda, tau);
  else
    parallel::transpose_product(view, lambda, tau);
}

void forward_product(const ConstraintView& view, const Vector& x, Vector& out,
                     ExecPolicy policy) {
  check_shapes(view);
  if (x.size() != view.cells()) throw std::invalid_argument("plan length does not match N^2");
  if (policy == ExecPolicy::Serial)
    serial::forward_product(view, x, out);
  else
    parallel::forward_product(view, x, out);
}

void weighted_gram(const ConstraintView& view, const Vector& w, Matrix& out,
                   ExecPolicy policy) {
  check_shapes(view);
  if (w.size() != view.cells()) throw std::invalid_argument("weight length does not match N^2");
  if (policy == ExecPolicy::Serial)
    serial::weighted_gram(view, w, out);
  else
    parallel::weighted_gram(view, w, out);
}

double log_partition_sum(const Vector& tau, const Vector& lower, const Vector& upper,
                         ExecPolicy policy) {
  const Eigen::Index n = tau.size();
  if (policy == ExecPolicy::Serial) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) s += two_point::log_partition(tau[k], lower[k], upper[k]);
    return s;
  }
  return blocked_sum(n, [&](Eigen::Index k) {
    return two_point::log_partition(tau[k], lower[k], upper[k]);
  });
}

void primal_map(const Vector& tau, const Vector& lower, const Vector& upper, Vector& x,
                ExecPolicy policy) {
  const Eigen::Index n = tau.size();
  x.resize(n);
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::Parallel && n >= kParallelThreshold)
  for (Eigen::Index k = 0; k < n; ++k) x[k] = two_point::mean(tau[k], lower[k], upper[k]);
}

void variance_map(const Vector& tau, const Vector& lower, const Vector& upper, Vector& w,
                  ExecPolicy policy) {
  const Eigen::Index n = tau.size();
  w.resize(n);
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::Parallel && n >= kParallelThreshold)
  for (Eigen::Index k = 0; k < n; ++k) w[k] = two_point::variance(tau[k], lower[k], upper[k]);
}

double dot(const Vector& u, const Vector& v, ExecPolicy policy) {
  if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
  if (policy == ExecPolicy::Serial) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  }
  return blocked_sum(u.size(), [&](Eigen::Index k) { return u[k] * v[k]; });
}

}  // namespace memtp::kernels
