#include "memtp/verify.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memtp::verify {

int elimination_rank(Matrix m, double tol) {
  int rank = 0;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index pivot = rank;
    for (Eigen::Index r = rank + 1; r < rows; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) <= tol * scale) continue;
    m.row(pivot).swap(m.row(rank));
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      const double f = m(r, col) / m(rank, col);
      if (f != 0.0) m.row(r) -= f * m.row(rank);
    }
    ++rank;
  }
  return rank;
}

double log_partition_reference(const Vector& tau, const Vector& lower, const Vector& upper) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Big total = 0;
  for (Eigen::Index n = 0; n < tau.size(); ++n) {
    const Big t = tau[n];
    total += boost::multiprecision::log(boost::multiprecision::exp(-Big(lower[n]) * t) +
                                        boost::multiprecision::exp(-Big(upper[n]) * t));
  }
  return static_cast<double>(total);
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double up = f(probe);
    probe[k] = x[k] - h;
    const double down = f(probe);
    probe[k] = x[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  Matrix j;
  Vector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const Vector up = f(probe);
    probe[k] = x[k] - h;
    const Vector down = f(probe);
    probe[k] = x[k];
    if (k == 0) j.resize(up.size(), x.size());
    j.col(k) = (up - down) / (2.0 * h);
  }
  return j;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double lo, double hi, double flo, double fmid,
                    double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = f(lm), frm = f(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
         simpson_step(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol, int max_depth) {
  if (lo == hi) return 0.0;
  const double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol, max_depth);
}

double coordinate_length_quadrature(double tau1, double tau2, double width, double tol) {
  // Variance of the two-point law: D^2 p (1 - p), p the weight of the lower atom.
  auto speed = [width](double t) {
    const double z = width * t;
    const double p = z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
    return std::sqrt(width * width * p * (1.0 - p));
  };
  const double lo = std::min(tau1, tau2), hi = std::max(tau1, tau2);
  // Split at 0 where the integrand peaks, so both halves are monotone.
  if (lo < 0.0 && hi > 0.0) return adaptive_simpson(speed, lo, 0.0, 0.5 * tol) + adaptive_simpson(speed, 0.0, hi, 0.5 * tol);
  return adaptive_simpson(speed, lo, hi, tol);
}

VertexMinimum vertex_enumeration_minimum(const TransportProblem& problem) {
  const int n = problem.side;
  if (n < 1 || n > 4) throw std::invalid_argument("vertex enumeration is limited to N <= 4");
  const int cells = n * n, basis = 2 * n - 1;
  Matrix c = Matrix::Zero(2 * n, cells);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c(i, i * n + j) = 1.0;
      c(n + j, i * n + j) = 1.0;
    }
  Vector y(2 * n);
  y << problem.p, problem.q;

  VertexMinimum best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<bool> chosen(static_cast<std::size_t>(cells), false);
  std::fill(chosen.begin(), chosen.begin() + basis, true);
  do {
    std::vector<int> cols;
    for (int k = 0; k < cells; ++k)
      if (chosen[static_cast<std::size_t>(k)]) cols.push_back(k);
    Matrix sub(2 * n, basis);
    for (int k = 0; k < basis; ++k) sub.col(k) = c.col(cols[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() < basis) continue;
    const Vector xb = lu.solve(y);
    if ((sub * xb - y).lpNorm<Eigen::Infinity>() > 1e-10 || xb.minCoeff() < -1e-12) continue;
    Vector x = Vector::Zero(cells);
    double cost = 0.0;
    for (int k = 0; k < basis; ++k) {
      const int cell = cols[static_cast<std::size_t>(k)];
      x[cell] = std::max(0.0, xb[k]);
      cost += problem.cost(cell / n, cell % n) * x[cell];
    }
    ++best.vertices;
    if (cost < best.cost) {
      best.cost = cost;
      best.x = x;
    }
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return best;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

TransportProblem random_problem(std::mt19937_64& rng, int side, bool with_cost) {
  std::uniform_real_distribution<double> mass(0.05, 1.0), unit(0.0, 1.0);
  Vector p(side), q(side);
  for (int i = 0; i < side; ++i) p[i] = mass(rng);
  for (int j = 0; j < side; ++j) q[j] = mass(rng);
  p /= p.sum();
  q /= q.sum();
  Matrix w;
  if (with_cost) {
    w.resize(side, side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) w(i, j) = unit(rng);
  }
  return TransportProblem::make(p, q, w);
}

}  // namespace memtp::verify
