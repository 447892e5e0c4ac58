#pragma once

// Independent reference computations and the invariant suites behind
// `memtp verify`. Nothing in the solver path depends on this header.

#include "memtp/problem.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace memtp::verify {

// ---- oracles ---------------------------------------------------------------

/// Rank by Gaussian elimination with partial pivoting.
int elimination_rank(Matrix m, double tol = 1e-10);

/// ln Z = sum_n ln(e^{-a tau} + e^{-b tau}) evaluated in 50-digit arithmetic
/// from the plain definition.
double log_partition_reference(const Vector& tau, const Vector& lower, const Vector& upper);

/// Central differences with step h.
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h);
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol,
                        int max_depth = 50);

/// Length of the segment [tau1, tau2] of one coordinate under the metric
/// D^2 p (1 - p), p = 1 / (1 + e^{D tau}), by quadrature.
double coordinate_length_quadrature(double tau1, double tau2, double width, double tol = 1e-12);

/// Minimal cost over the vertices of the transportation polytope, by
/// enumerating every set of 2N - 1 cells. Intended for N <= 4.
struct VertexMinimum {
  double cost = 0.0;
  Vector x;
  long vertices = 0;
};
VertexMinimum vertex_enumeration_minimum(const TransportProblem& problem);

/// Random instance: marginals with entries in [0.05, 1] normalised to 1,
/// cost matrix entries in [0, 1], unit boxes.
TransportProblem random_problem(std::mt19937_64& rng, int side, bool with_cost = true);

/// Generator for (seed, stream) independent of evaluation order.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream);

// ---- suites ----------------------------------------------------------------

struct VerifyConfig {
  std::uint64_t seed = 20170321;
  std::optional<std::size_t> samples;  // overrides each suite's main sample count
  double grid = 1e-3;                  // geodesic ODE grid step
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::vector<std::pair<std::string, double>> metrics;  // in insertion order
  std::vector<std::string> failing_cases;               // enough to reproduce
  std::optional<Table> table;

  bool passed() const { return failures == 0; }
};

const std::vector<std::string>& suite_names();
/// Throws std::invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, const VerifyConfig& config);

}  // namespace memtp::verify
