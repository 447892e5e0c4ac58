#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>

namespace memtp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Selects between the serial reference kernels and the OpenMP kernels.
///
/// The parallel kernels reduce over fixed-size blocks and combine the partial
/// sums in block order, so their output does not depend on the thread count.
/// They are not bit-identical to the serial kernels (different summation
/// order); tests compare the two at 1e-12 relative.
enum class ExecPolicy { Serial, Parallel };

/// Column structure of the augmented constraint matrix A. Column k (cell
/// (i, j), 0-based, k = i*N + j) has a one in row i, a one in row N + j,
/// W_k in the cost row when present, and v_e[k] in each extra row.
struct ConstraintView {
  int side = 0;
  std::span<const double> cost;  // empty when there is no cost row
  const RowMatrix* extra = nullptr;

  Eigen::Index cells() const { return Eigen::Index(side) * side; }
  Eigen::Index extra_rows() const { return extra ? extra->rows() : 0; }
  Eigen::Index rows() const {
    return 2 * Eigen::Index(side) + (cost.empty() ? 0 : 1) + extra_rows();
  }
  Eigen::Index first_extra_row() const {
    return 2 * Eigen::Index(side) + (cost.empty() ? 0 : 1);
  }
};

// Per-coordinate quantities of the two-point reference measure with atoms at
// a and b, tilted by exp(-tau * xi). Written to stay finite for any finite tau.
namespace two_point {

/// ln(e^{-a tau} + e^{-b tau}); a degenerate coordinate (a == b) carries a
/// single atom and contributes -a tau.
inline double log_partition(double tau, double a, double b) {
  const double width = b - a;
  if (width == 0.0) return -a * tau;
  return -std::min(a * tau, b * tau) + std::log1p(std::exp(-std::abs(width * tau)));
}

/// Tilted mean a + (b - a) / (1 + e^{(b - a) tau}).
inline double mean(double tau, double a, double b) {
  const double width = b - a;
  if (width == 0.0) return a;
  const double z = width * tau;
  if (z > 0.0) {
    const double e = std::exp(-z);
    return a + width * e / (1.0 + e);
  }
  return a + width / (1.0 + std::exp(z));
}

/// Tilted variance (b - a)^2 e^{-|D tau|} / (1 + e^{-|D tau|})^2.
inline double variance(double tau, double a, double b) {
  const double width = b - a;
  if (width == 0.0) return 0.0;
  const double e = std::exp(-std::abs(width * tau));
  const double s = 1.0 + e;
  return width * width * e / (s * s);
}

}  // namespace two_point

namespace kernels {

/// tau = A^t lambda.
void transpose_product(const ConstraintView& view, const Vector& lambda, Vector& tau,
                       ExecPolicy policy);
/// out = A x.
void forward_product(const ConstraintView& view, const Vector& x, Vector& out,
                     ExecPolicy policy);
/// out = A diag(w) A^t.
void weighted_gram(const ConstraintView& view, const Vector& w, Matrix& out,
                   ExecPolicy policy);

/// Sum over coordinates of two_point::log_partition.
double log_partition_sum(const Vector& tau, const Vector& lower, const Vector& upper,
                         ExecPolicy policy);
void primal_map(const Vector& tau, const Vector& lower, const Vector& upper, Vector& x,
                ExecPolicy policy);
void variance_map(const Vector& tau, const Vector& lower, const Vector& upper, Vector& w,
                  ExecPolicy policy);

/// Inner product reduced in fixed blocks (thread-count independent).
double dot(const Vector& u, const Vector& v, ExecPolicy policy);

}  // namespace kernels
}  // namespace memtp
