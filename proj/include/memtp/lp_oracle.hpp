#pragma once

#include "memtp/problem.hpp"

#include <vector>

namespace memtp {

/// Vertex solution of min <W, x> subject to the marginal constraints.
struct LpSolution {
  Vector x;                // N^2, lexicographic
  double cost = 0.0;
  std::vector<int> basis;  // 1-based lexicographic cell indices, 2N - 1 of them
  Vector row_potential;    // u_i
  Vector col_potential;    // v_j
  double min_reduced_cost = 0.0;   // min_ij W_ij - u_i - v_j over all cells
  double marginal_residual = 0.0;  // max |row / column sum - marginal|
  int pivots = 0;
};

/// Primal transportation simplex: northwest-corner start, u-v (MODI)
/// optimality test, pivoting around the basis cycle, and an epsilon
/// perturbation of the supplies against degenerate pivots. Bounds other than
/// [0, 1] are ignored. Throws std::invalid_argument when the marginals carry
/// different mass, std::runtime_error if the pivot budget is exhausted.
LpSolution lp_oracle(const TransportProblem& problem);

}  // namespace memtp
