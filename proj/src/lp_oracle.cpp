#include "memtp/lp_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace memtp {
namespace {

struct Cell {
  int i;
  int j;
};

// Spanning tree over 2N nodes (rows 0..N-1, columns N..2N-1); each basic
// cell is an edge.
class BasisTree {
 public:
  BasisTree(int n, const std::vector<Cell>& cells) : n_(n), adj_(static_cast<std::size_t>(2 * n)) {
    for (std::size_t e = 0; e < cells.size(); ++e) {
      adj_[static_cast<std::size_t>(cells[e].i)].push_back({cells[e].j + n, static_cast<int>(e)});
      adj_[static_cast<std::size_t>(cells[e].j + n)].push_back({cells[e].i, static_cast<int>(e)});
    }
  }

  // Edge indices along the tree path from node `from` to node `to`.
  std::vector<int> path(int from, int to) const {
    std::vector<int> parent_edge(adj_.size(), -1), parent_node(adj_.size(), -1);
    std::vector<int> stack{from};
    std::vector<bool> seen(adj_.size(), false);
    seen[static_cast<std::size_t>(from)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (u == to) break;
      for (const auto& [v, e] : adj_[static_cast<std::size_t>(u)]) {
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        parent_edge[static_cast<std::size_t>(v)] = e;
        parent_node[static_cast<std::size_t>(v)] = u;
        stack.push_back(v);
      }
    }
    if (!seen[static_cast<std::size_t>(to)]) throw std::logic_error("basis is not a spanning tree");
    std::vector<int> edges;
    for (int v = to; v != from; v = parent_node[static_cast<std::size_t>(v)])
      edges.push_back(parent_edge[static_cast<std::size_t>(v)]);
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

  // u_i + v_j = W_ij on every basic cell, with u_0 = 0.
  void potentials(const std::vector<Cell>& cells, const Matrix& w, Vector& u, Vector& v) const {
    u = Vector::Zero(n_);
    v = Vector::Zero(n_);
    std::vector<bool> seen(adj_.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const auto& [b, e] : adj_[static_cast<std::size_t>(a)]) {
        if (seen[static_cast<std::size_t>(b)]) continue;
        seen[static_cast<std::size_t>(b)] = true;
        const Cell c = cells[static_cast<std::size_t>(e)];
        if (b >= n_)
          v[b - n_] = w(c.i, c.j) - u[a];
        else
          u[b] = w(c.i, c.j) - v[a - n_];
        stack.push_back(b);
      }
    }
  }

  // Flows on the tree edges reproducing the given supplies and demands, by
  // repeated leaf elimination.
  std::vector<double> flows(const std::vector<Cell>& cells, const Vector& supply, const Vector& demand) const {
    std::vector<double> remaining(adj_.size());
    for (int i = 0; i < n_; ++i) remaining[static_cast<std::size_t>(i)] = supply[i];
    for (int j = 0; j < n_; ++j) remaining[static_cast<std::size_t>(j + n_)] = demand[j];
    std::vector<int> degree(adj_.size());
    for (std::size_t a = 0; a < adj_.size(); ++a) degree[a] = static_cast<int>(adj_[a].size());
    std::vector<bool> edge_done(cells.size(), false);
    std::vector<double> out(cells.size(), 0.0);
    std::vector<int> leaves;
    for (std::size_t a = 0; a < adj_.size(); ++a)
      if (degree[a] == 1) leaves.push_back(static_cast<int>(a));
    while (!leaves.empty()) {
      const int a = leaves.back();
      leaves.pop_back();
      if (degree[static_cast<std::size_t>(a)] != 1) continue;
      for (const auto& [b, e] : adj_[static_cast<std::size_t>(a)]) {
        if (edge_done[static_cast<std::size_t>(e)]) continue;
        edge_done[static_cast<std::size_t>(e)] = true;
        out[static_cast<std::size_t>(e)] = remaining[static_cast<std::size_t>(a)];
        remaining[static_cast<std::size_t>(b)] -= remaining[static_cast<std::size_t>(a)];
        remaining[static_cast<std::size_t>(a)] = 0.0;
        --degree[static_cast<std::size_t>(a)];
        if (--degree[static_cast<std::size_t>(b)] == 1) leaves.push_back(b);
        break;
      }
    }
    return out;
  }

 private:
  int n_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

}  // namespace

LpSolution lp_oracle(const TransportProblem& problem) {
  const int n = problem.side;
  if (n < 1 || problem.p.size() != n || problem.q.size() != n)
    throw std::invalid_argument("oracle: marginals must have length N >= 1");
  if (problem.cost.rows() != n || problem.cost.cols() != n)
    throw std::invalid_argument("oracle: cost matrix must be N x N");
  if ((problem.p.array() < 0.0).any() || (problem.q.array() < 0.0).any())
    throw std::invalid_argument("oracle: marginals must be nonnegative");
  if (std::abs(problem.p.sum() - problem.q.sum()) > kMarginalTolerance)
    throw std::invalid_argument(fmt::format("oracle: marginals carry different mass ({:.17g} vs {:.17g})",
                                            problem.p.sum(), problem.q.sum()));
  const Matrix& w = problem.cost;

  // Perturbed supplies keep every basic flow strictly positive, so each
  // pivot makes progress.
  const double eps = 1e-9 / n;
  Vector supply = problem.p.array() + eps;
  Vector demand = problem.q;
  demand[n - 1] += n * eps;

  std::vector<Cell> basis;
  std::vector<double> flow;
  {
    Vector s = supply, d = demand;
    int i = 0, j = 0;
    while (true) {
      const double amount = std::min(s[i], d[j]);
      basis.push_back({i, j});
      flow.push_back(amount);
      s[i] -= amount;
      d[j] -= amount;
      if (i == n - 1 && j == n - 1) break;
      if (i == n - 1)
        ++j;
      else if (j == n - 1)
        ++i;
      else if (s[i] <= d[j])
        ++i;
      else
        ++j;
    }
  }

  LpSolution sol;
  const int max_pivots = 50 * n * n + 100;
  Vector u, v;
  while (true) {
    const BasisTree tree(n, basis);
    tree.potentials(basis, w, u, v);
    double best = -1e-12;
    int enter_i = -1, enter_j = -1;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double r = w(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          enter_i = i;
          enter_j = j;
        }
      }
    if (enter_i < 0) break;
    if (sol.pivots >= max_pivots) throw std::runtime_error("oracle: pivot limit reached");

    // Entering edge (+) closes a cycle with the tree path from its column
    // back to its row; signs alternate -, +, - ... along that path.
    const std::vector<int> cycle = tree.path(enter_j + n, enter_i);
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (std::size_t pos = 0; pos < cycle.size(); pos += 2) {
      const int e = cycle[pos];
      if (flow[static_cast<std::size_t>(e)] < theta) {
        theta = flow[static_cast<std::size_t>(e)];
        leaving = e;
      }
    }
    for (std::size_t pos = 0; pos < cycle.size(); ++pos)
      flow[static_cast<std::size_t>(cycle[pos])] += (pos % 2 == 0) ? -theta : theta;
    basis[static_cast<std::size_t>(leaving)] = {enter_i, enter_j};
    flow[static_cast<std::size_t>(leaving)] = theta;
    ++sol.pivots;
  }

  // Remove the perturbation: recompute basic flows from the exact marginals.
  const BasisTree tree(n, basis);
  std::vector<double> exact = tree.flows(basis, problem.p, problem.q);
  sol.x = Vector::Zero(Eigen::Index(n) * n);
  for (std::size_t e = 0; e < basis.size(); ++e) {
    double value = exact[e];
    if (value < 0.0 && value > -1e-12) value = 0.0;
    if (value < 0.0) throw std::runtime_error(fmt::format("oracle: negative basic flow {:.3g}", value));
    sol.x[Eigen::Index(basis[e].i) * n + basis[e].j] = value;
    sol.basis.push_back(basis[e].i * n + basis[e].j + 1);
  }
  std::sort(sol.basis.begin(), sol.basis.end());

  tree.potentials(basis, w, u, v);
  sol.row_potential = u;
  sol.col_potential = v;
  sol.min_reduced_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sol.min_reduced_cost = std::min(sol.min_reduced_cost, w(i, j) - u[i] - v[j]);

  double residual = 0.0, cost = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += sol.x[Eigen::Index(i) * n + j];
      col += sol.x[Eigen::Index(j) * n + i];
      cost += w(i, j) * sol.x[Eigen::Index(i) * n + j];
    }
    residual = std::max({residual, std::abs(row - problem.p[i]), std::abs(col - problem.q[i])});
  }
  sol.cost = cost;
  sol.marginal_residual = residual;
  return sol;
}

}  // namespace memtp
