#include "memtp/verify.hpp"

#include "memtp/bounds.hpp"
#include "memtp/dual_solver.hpp"
#include "memtp/geometry.hpp"
#include "memtp/lp_oracle.hpp"
#include "memtp/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memtp::verify {
namespace {

constexpr std::size_t kMaxRecordedFailures = 50;

class Recorder {
 public:
  Recorder(std::string name, std::uint64_t seed) {
    report_.name = std::move(name);
    report_.seed = seed;
  }

  bool check(bool ok, const std::string& what) {
    ++report_.cases;
    if (!ok) {
      ++report_.failures;
      if (report_.failing_cases.size() < kMaxRecordedFailures) report_.failing_cases.push_back(what);
    }
    return ok;
  }

  // Tracks the largest value seen under `name`.
  void peak(const std::string& name, double value) {
    auto it = std::find_if(report_.metrics.begin(), report_.metrics.end(), [&](const auto& m) { return m.first == name; });
    if (it == report_.metrics.end())
      report_.metrics.emplace_back(name, value);
    else if (value > it->second || std::isnan(value))
      it->second = value;
  }
  void set(const std::string& name, double value) { report_.metrics.emplace_back(name, value); }

  SuiteReport& report() { return report_; }

 private:
  SuiteReport report_;
};

double rel_err(const Vector& got, const Vector& want) {
  const double scale = want.lpNorm<Eigen::Infinity>();
  return (got - want).lpNorm<Eigen::Infinity>() / (scale > 0.0 ? scale : 1.0);
}

double rel_err(const Matrix& got, const Matrix& want) {
  const double scale = want.lpNorm<Eigen::Infinity>();
  return (got - want).lpNorm<Eigen::Infinity>() / (scale > 0.0 ? scale : 1.0);
}

BoxBounds random_box(std::mt19937_64& rng, Eigen::Index size, double min_width = 0.1) {
  std::uniform_real_distribution<double> lower(-1.0, 1.0), width(min_width, 2.0);
  BoxBounds b = BoxBounds::uniform(size);
  for (Eigen::Index k = 0; k < size; ++k) {
    b.lower[k] = lower(rng);
    b.upper[k] = b.lower[k] + width(rng);
  }
  return b;
}

Vector interior_point(std::mt19937_64& rng, const BoxBounds& box, double margin = 0.0) {
  std::uniform_real_distribution<double> unit(margin, 1.0 - margin);
  Vector x(box.size());
  for (Eigen::Index k = 0; k < box.size(); ++k) {
    double u = unit(rng);
    while (u == 0.0) u = unit(rng);
    x[k] = box.lower[k] + box.width(k) * u;
  }
  return x;
}

Vector uniform_vector(std::mt19937_64& rng, Eigen::Index size, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = dist(rng);
  return v;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

TransportProblem canonical_two_by_two() {
  Vector half = Vector::Constant(2, 0.5);
  Matrix w(2, 2);
  w << 0.0, 1.0, 1.0, 0.0;
  return TransportProblem::make(half, half, w);
}

// ---- problem ---------------------------------------------------------------

SuiteReport problem_suite(const VerifyConfig& config) {
  Recorder rec("problem", config.seed);
  for (int n = 2; n <= 10; ++n) {
    const int rank = elimination_rank(build_marginal_constraints(n));
    rec.check(rank == 2 * n - 1, fmt::format("rank C({}) = {}, expected {}", n, rank, 2 * n - 1));
  }
  for (int side = 1; side <= 12; ++side)
    for (int n = 1; n <= side * side; ++n) {
      const auto [i, j] = unlex_index(n, side);
      if (lex_index(i, j, side) != n || i < 1 || i > side || j < 1 || j > side)
        rec.check(false, fmt::format("relabeling roundtrip N = {}, n = {}", side, n));
    }
  rec.check(true, "relabeling roundtrips N = 1..12");

  // C from its definition through the inverse relabeling.
  for (int side = 1; side <= 8; ++side) {
    const Matrix c = build_marginal_constraints(side);
    Matrix want = Matrix::Zero(2 * side, side * side);
    for (int n = 1; n <= side * side; ++n) {
      const auto [i, j] = unlex_index(n, side);
      want(i - 1, n - 1) = 1.0;
      want(side + j - 1, n - 1) = 1.0;
    }
    rec.check(c == want, fmt::format("marginal matrix N = {} differs from its definition", side));
  }

  const std::size_t samples = config.samples.value_or(30);
  auto rng = make_rng(config.seed, 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const int side = uniform_int(rng, 1, 12);
    TransportProblem problem = random_problem(rng, side);
    const Vector v = uniform_vector(rng, problem.cells(), -1.0, 1.0);
    problem.extra.push_back({v, 0.1});
    const AugmentedSystem system = augment_constraints(problem, initial_cost(problem.p, problem.q, problem.cost));
    const Matrix a = system.dense();
    const Vector x = uniform_vector(rng, system.cols(), 0.0, 1.0);
    const Vector lambda = uniform_vector(rng, system.rows(), -2.0, 2.0);
    const Vector w = uniform_vector(rng, system.cols(), 0.0, 1.0);
    const double e1 = rel_err(system.apply(x, ExecPolicy::Serial), a * x);
    const double e2 = rel_err(system.apply_transpose(lambda, ExecPolicy::Serial), a.transpose() * lambda);
    const Matrix gram_dense = a * w.asDiagonal() * a.transpose();
    const double e3 = rel_err(system.weighted_gram(w, ExecPolicy::Serial), gram_dense);
    const double p1 = rel_err(system.apply(x, ExecPolicy::Parallel), system.apply(x, ExecPolicy::Serial));
    const double p2 = rel_err(system.apply_transpose(lambda, ExecPolicy::Parallel),
                              system.apply_transpose(lambda, ExecPolicy::Serial));
    const double p3 = rel_err(system.weighted_gram(w, ExecPolicy::Parallel), system.weighted_gram(w, ExecPolicy::Serial));
    rec.peak("max_product_error", std::max({e1, e2, e3}));
    rec.peak("max_policy_difference", std::max({p1, p2, p3}));
    rec.check(std::max({e1, e2, e3}) <= 1e-12, fmt::format("sample {}: structured products differ from dense A", s));
    rec.check(std::max({p1, p2, p3}) <= 1e-12, fmt::format("sample {}: serial and parallel products differ", s));
  }

  TransportProblem bad = TransportProblem::make(Vector::Constant(2, 0.6), Vector::Constant(2, 0.5));
  const auto violations = validate_problem(bad);
  rec.check(!violations.empty(), "marginal summing to 1.2 accepted");
  return rec.report();
}

// ---- dual ------------------------------------------------------------------

SuiteReport dual_suite(const VerifyConfig& config) {
  Recorder rec("dual", config.seed);

  {
    TransportProblem uniform = TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
    const SolveOutcome out = solve_maxent(uniform);
    const double want = 4.0 * std::log(4.0 / 3.0) + std::log(3.0);
    const bool ok = out.converged() && (out.solution->x.array() - 0.25).abs().maxCoeff() <= 1e-8 &&
                    std::abs(out.solution->dual_value - want) <= 1e-9;
    rec.check(ok, "2x2 uniform closed form");
    if (out.solution) rec.set("closed_form_dual_error", std::abs(out.solution->dual_value - want));
  }
  {
    TransportProblem boundary = canonical_two_by_two();
    boundary.cost_target = 0.0;
    const SolveOutcome out = solve_maxent(boundary);
    const bool ok = out.status == SolveStatus::Boundary && out.pins.size() == 4 && out.pins[1] == Pin::Lower &&
                    out.pins[2] == Pin::Lower && out.pins[0] == Pin::Interior && out.pins[3] == Pin::Interior;
    rec.check(ok, fmt::format("2x2 at c = 0: status {}", to_string(out.status)));
  }

  const std::size_t samples = config.samples.value_or(40);
  auto rng = make_rng(config.seed, 2);
  for (std::size_t s = 0; s < samples; ++s) {
    const int side = uniform_int(rng, 2, 12);
    TransportProblem problem = random_problem(rng, side);
    problem.cost_target = initial_cost(problem.p, problem.q, problem.cost);
    const SolveOutcome out = solve_maxent(problem);
    if (!rec.check(out.converged(), fmt::format("instance {} (N = {}): status {}", s, side, to_string(out.status))))
      continue;
    const MaxentSolution& sol = *out.solution;
    const double gap = std::abs(sol.entropy - sol.dual_value);
    rec.peak("max_residual", sol.residual);
    rec.peak("max_duality_gap", gap);
    rec.peak("max_iterations", sol.iterations);
    rec.check(sol.residual <= 1e-8, fmt::format("instance {}: residual {:.3e}", s, sol.residual));
    rec.check(gap <= 1e-6, fmt::format("instance {}: duality gap {:.3e}", s, gap));
  }

  for (std::size_t s = 0; s < samples; ++s) {
    const int side = uniform_int(rng, 1, 10);
    const BoxBounds box = random_box(rng, Eigen::Index(side) * side);
    const AugmentedSystem system(side, Vector::Constant(side, 1.0 / side), Vector::Constant(side, 1.0 / side),
                                 std::nullopt, std::nullopt, {});
    const Vector lambda = uniform_vector(rng, system.rows(), -10.0, 10.0);
    const double got = log_partition(lambda, system, box);
    const double want = log_partition_reference(system.apply_transpose(lambda), box.lower, box.upper);
    const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
    rec.peak("max_log_partition_error", err);
    rec.check(err <= 1e-12, fmt::format("log partition sample {}: relative error {:.3e}", s, err));
  }

  for (int s = 0; s < 20; ++s) {
    const int side = uniform_int(rng, 2, 6);
    TransportProblem problem = random_problem(rng, side);
    problem.bounds = random_box(rng, problem.cells());
    const AugmentedSystem system = augment_constraints(problem, 0.4);
    const Vector lambda = uniform_vector(rng, system.rows(), -1.0, 1.0);
    const BoxBounds& box = problem.bounds;
    const Vector g = dual_gradient(lambda, system, box);
    const Vector g_fd = fd_gradient([&](const Vector& l) { return dual_objective(l, system, box); }, lambda, 1e-5);
    const Matrix hess = dual_hessian(lambda, system, box);
    const Matrix h_fd = fd_jacobian([&](const Vector& l) { return dual_gradient(l, system, box); }, lambda, 1e-5);
    const double eg = rel_err(g_fd, g), eh = rel_err(h_fd, hess);
    rec.peak("max_gradient_fd_error", eg);
    rec.peak("max_hessian_fd_error", eh);
    rec.check(eg <= 1e-5, fmt::format("gradient check {} (N = {}): {:.3e}", s, side, eg));
    rec.check(eh <= 1e-5, fmt::format("Hessian check {} (N = {}): {:.3e}", s, side, eh));
  }
  return rec.report();
}

// ---- geometry --------------------------------------------------------------

SuiteReport geometry_suite(const VerifyConfig& config) {
  Recorder rec("geometry", config.seed);
  const std::size_t samples = config.samples.value_or(100);
  auto rng = make_rng(config.seed, 3);

  double worst = 0.0;
  for (int m = 0; m <= 6000; ++m) {
    const double tau = -30.0 + 0.01 * m;
    const double err = std::abs(h_inverse(h_map(tau, 1.0), 1.0) - tau) / (1.0 + std::abs(tau));
    worst = std::max(worst, err);
  }
  rec.set("max_h_roundtrip_error", worst);
  rec.check(worst <= 1e-9, fmt::format("H(h(tau)) roundtrip error {:.3e}", worst));

  double worst_xi = 0.0, worst_tau = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0), scaled(-10.0, 10.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const BoxBounds box = random_box(rng, 1);
    const double a = box.lower[0], b = box.upper[0];
    const double xi = interior_point(rng, box)[0];
    if (xi > a && xi < b) worst_xi = std::max(worst_xi, std::abs(xi_of_tau(tau_of_xi(xi, a, b), a, b) - xi));
    const double tau = scaled(rng) / (b - a);
    worst_tau = std::max(worst_tau, std::abs(tau_of_xi(xi_of_tau(tau, a, b), a, b) - tau) / (1.0 + std::abs(tau)));
  }
  rec.set("max_xi_roundtrip_error", worst_xi);
  rec.set("max_tau_roundtrip_error", worst_tau);
  rec.check(worst_xi <= 1e-9, fmt::format("xi -> tau -> xi error {:.3e}", worst_xi));
  rec.check(worst_tau <= 1e-9, fmt::format("tau -> xi -> tau error {:.3e}", worst_tau));

  // Closed-form distance against quadrature of the metric speed.
  for (std::size_t s = 0; s < samples; ++s) {
    const BoxBounds box = random_box(rng, 4);
    const GeometryContext ctx(box);
    const Vector t1 = uniform_vector(rng, 4, -30.0, 30.0), t2 = uniform_vector(rng, 4, -30.0, 30.0);
    double sq = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) {
      const double len = coordinate_length_quadrature(t1[k], t2[k], box.width(k));
      sq += len * len;
    }
    const double want = std::sqrt(sq), got = dist_tau(t1, t2, ctx);
    const double err = std::abs(got - want) / want;
    rec.peak("max_length_quadrature_error", err);
    rec.check(err <= 1e-6, fmt::format("length pair {}: relative error {:.3e}", s, err));
  }

  // Pixel-space length by quadrature of sqrt(g).
  for (std::size_t s = 0; s < samples; ++s) {
    const BoxBounds box = random_box(rng, 1);
    const Vector x1 = interior_point(rng, box, 0.01), x2 = interior_point(rng, box, 0.01);
    const double a = box.lower[0], b = box.upper[0];
    const double lo = std::min(x1[0], x2[0]), hi = std::max(x1[0], x2[0]);
    const double want = adaptive_simpson([&](double xi) { return std::sqrt(pixel_metric(xi, a, b)); }, lo, hi, 1e-13);
    const double got = std::abs(k_map(x2[0], a, b) - k_map(x1[0], a, b));
    const double err = std::abs(got - want) / std::max(want, 1e-300);
    rec.peak("max_pixel_quadrature_error", err);
    rec.check(err <= 1e-6, fmt::format("pixel length {}: relative error {:.3e}", s, err));
  }

  // Geodesic equation along sampled geodesics; straight lines as control.
  Table table;
  table.columns = {"case", "geodesic_residual", "straight_line_residual"};
  const int steps = static_cast<int>(std::lround(1.0 / config.grid));
  for (int c = 0; c < 10; ++c) {
    const BoxBounds box = random_box(rng, 4, 0.5);
    const GeometryContext ctx(box);
    const Vector t1 = uniform_vector(rng, 4, -4.0, -2.0), t2 = uniform_vector(rng, 4, 2.0, 4.0);
    std::vector<Vector> geo, line;
    for (int m = 0; m <= steps; ++m) {
      const double t = static_cast<double>(m) / steps;
      geo.push_back(geodesic_tau(t1, t2, t, ctx));
      line.push_back(t1 + t * (t2 - t1));
    }
    const double step = 1.0 / steps;
    const double rg = geodesic_ode_residual(geo, step, ctx), rl = geodesic_ode_residual(line, step, ctx);
    table.rows.push_back({static_cast<double>(c), rg, rl});
    rec.peak("max_geodesic_residual", rg);
    rec.peak("min_straight_line_residual", -rl);
    rec.check(rg <= 1e-3, fmt::format("geodesic case {}: residual {:.3e}", c, rg));
    rec.check(rl > 1e-2, fmt::format("straight-line control {}: residual {:.3e}", c, rl));
  }
  for (auto& m : rec.report().metrics)
    if (m.first == "min_straight_line_residual") m.second = -m.second;
  rec.report().table = std::move(table);

  for (std::size_t s = 0; s < samples; ++s) {
    const BoxBounds box = random_box(rng, 9);
    const GeometryContext ctx(box);
    const Vector x1 = interior_point(rng, box), x2 = interior_point(rng, box);
    const DistanceRecord r = distance_record(x1, x2, ctx);
    const double err = std::abs(r.d_M - r.d_G);
    rec.peak("max_dM_dG_difference", err);
    rec.check(err <= 1e-10, fmt::format("d_M vs d_G pair {}: {:.3e}", s, err));
  }
  return rec.report();
}

// ---- bounds ----------------------------------------------------------------

SuiteReport bounds_suite(const VerifyConfig& config) {
  Recorder rec("bounds", config.seed);
  const std::size_t pairs = config.samples.value_or(10000);
  const std::pair<BoundFamily, const char*> families[] = {
      {BoundFamily::Exponent, "exponent"}, {BoundFamily::Pixel, "pixel"}, {BoundFamily::Solution, "solution"}};
  for (const auto& [family, name] : families) {
    BoundSampleConfig sc;
    sc.family = family;
    sc.side = 3;
    sc.pairs = pairs;
    sc.seed = config.seed;
    const BoundBatch batch = sample_bound_pairs(sc);
    double l1_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < batch.reports.size(); ++k) {
      const BoundReport& r = batch.reports[k];
      rec.check(r.satisfied() && r.naive_ok, fmt::format("{} pair {} (seed {})", name, k, config.seed));
      l1_excess = std::max(l1_excess, r.lhs_l1_scaled - r.lhs_l2);
    }
    rec.set(fmt::format("{}_violations", name), static_cast<double>(batch.violations));
    rec.set(fmt::format("{}_naive_violations", name), static_cast<double>(batch.naive_violations));
    rec.check(l1_excess <= kBoundSlack, fmt::format("{}: scaled l1 exceeds l2 by {:.3e}", name, l1_excess));
  }

  auto rng = make_rng(config.seed, 4);
  // Pixel report equals the exponent report at the pulled-back points.
  for (int s = 0; s < 100; ++s) {
    const BoxBounds box = random_box(rng, 4);
    const GeometryContext ctx(box);
    const Vector x1 = interior_point(rng, box, 1e-3), x2 = interior_point(rng, box, 1e-3);
    const BoundReport a = check_bounds_pixel(x1, x2, ctx);
    const BoundReport b = check_bounds_tau(ctx.tau_of(x1), ctx.tau_of(x2), ctx);
    const double diff = std::max({std::abs(a.lhs_l2 - b.lhs_l2), std::abs(a.rhs_geodesic - b.rhs_geodesic),
                                  std::abs(a.rhs_sup - b.rhs_sup), std::abs(a.naive_rhs - b.naive_rhs)});
    rec.peak("max_pixel_exponent_difference", diff);
    rec.check(diff <= 1e-10, fmt::format("pixel/exponent consistency {}: {:.3e}", s, diff));
  }

  // Far-apart exponents: the geodesic bound stays below (L/2) pi N.
  {
    const GeometryContext ctx = GeometryContext::uniform(9);
    const BoundReport r = check_bounds_tau(Vector::Constant(9, -30.0), Vector::Constant(9, 30.0), ctx);
    rec.check(r.satisfied() && r.rhs_geodesic <= 0.5 * std::numbers::pi * 3.0 && r.rhs_geodesic < r.naive_rhs,
              "far-apart pair: geodesic bound not tighter than the naive one");
    rec.set("far_pair_geodesic_rhs", r.rhs_geodesic);
    rec.set("far_pair_naive_rhs", r.naive_rhs);
  }

  // Solved plans at different cost levels.
  for (int s = 0; s < 20; ++s) {
    const int side = uniform_int(rng, 2, 5);
    TransportProblem problem = random_problem(rng, side);
    const double c0 = initial_cost(problem.p, problem.q, problem.cost);
    const LpSolution lp = lp_oracle(problem);
    problem.cost_target = c0;
    const SolveOutcome o1 = solve_maxent(problem);
    problem.cost_target = 0.5 * (c0 + lp.cost);
    const SolveOutcome o2 = solve_maxent(problem);
    if (!rec.check(o1.converged() && o2.converged(), fmt::format("solution pair {}: solve failed", s))) continue;
    const AugmentedSystem system = augment_constraints(problem, problem.cost_target);
    const BoundReport r =
        check_bounds_solutions(o1.solution->lambda, o2.solution->lambda, system, GeometryContext(problem.bounds));
    rec.check(r.satisfied(), fmt::format("solution pair {}: bound violated", s));
  }

  // Diverging multipliers still give a finite geodesic bound.
  {
    TransportProblem boundary = canonical_two_by_two();
    boundary.cost_target = 0.0;
    const SolveOutcome out = solve_maxent(boundary);
    const AugmentedSystem system = augment_constraints(boundary, 0.0);
    const BoundReport r = check_bounds_solutions(Vector::Zero(system.rows()), out.last.lambda, system,
                                                 GeometryContext::uniform(4));
    rec.check(std::isfinite(r.rhs_geodesic) && r.satisfied() && r.rhs_geodesic <= 0.5 * std::numbers::pi * 2.0,
              "near-boundary plan: geodesic bound not finite");
    rec.set("boundary_lambda_norm", out.last.lambda.norm());
    rec.set("boundary_geodesic_rhs", r.rhs_geodesic);
  }
  return rec.report();
}

// ---- sweep -----------------------------------------------------------------

SuiteReport sweep_suite(const VerifyConfig& config) {
  Recorder rec("sweep", config.seed);
  const TransportProblem canonical = canonical_two_by_two();
  {
    SweepConfig sc;
    sc.delta = 0.05;
    const SweepResult r = run_sweep(canonical, sc);
    const LpSolution lp = lp_oracle(canonical);
    const GapReport gap = gap_report(r, lp);
    rec.set("canonical_c_star", r.c_star);
    rec.set("canonical_gap", gap.gap);
    rec.check(std::abs(gap.gap - 0.05) <= 1e-8, fmt::format("canonical sweep: gap {:.17g}", gap.gap));
    bool monotone = true;
    for (int n = 0; n <= r.n_star; ++n) {
      const SweepStep& s = r.trace[static_cast<std::size_t>(n)];
      monotone = monotone && s.status == SolveStatus::Converged && std::abs(s.achieved_cost - s.c) <= 1e-8;
    }
    rec.check(monotone && r.trace.back().status != SolveStatus::Converged, "canonical sweep: trace not monotone");
    // Oracle cells at a bound are within 10 delta of that bound in the sweep plan.
    bool pinned = true;
    for (Eigen::Index k = 0; k < 4; ++k)
      if (lp.x[k] == 0.0) pinned = pinned && r.plan()[k] <= 10.0 * sc.delta;
    rec.check(pinned, "canonical sweep: oracle-pinned cells far from their bound");
  }
  {
    SweepConfig sc;
    sc.delta = 1e-3;
    const SweepResult r = run_sweep(canonical, sc);
    const double off = r.plan()[1] + r.plan()[2];
    rec.set("fine_sweep_off_diagonal_mass", off);
    rec.check(off <= 1e-2, fmt::format("fine sweep: off-diagonal mass {:.3e}", off));
  }
  {
    TransportProblem flat = TransportProblem::make(Vector::Constant(3, 1.0 / 3), Vector::Constant(3, 1.0 / 3),
                                                   Matrix::Constant(3, 3, 0.7));
    SweepConfig sc;
    sc.delta = 1e-2;
    const SweepResult r = run_sweep(flat, sc);
    const GapReport gap = gap_report(r, lp_oracle(flat));
    rec.check(r.n_star == 0 && r.trace.size() == 2 && std::abs(gap.gap) <= 1e-8,
              "constant cost: sweep should stop at the first step");
  }

  const std::size_t samples = config.samples.value_or(10);
  auto rng = make_rng(config.seed, 5);
  for (std::size_t s = 0; s < samples; ++s) {
    const int side = uniform_int(rng, 2, 8);
    const TransportProblem problem = random_problem(rng, side);
    SweepConfig sc;
    sc.delta = 1e-2;
    const SweepResult r = run_sweep(problem, sc);
    const GapReport gap = gap_report(r, lp_oracle(problem));
    rec.peak("max_gap", gap.gap);
    rec.peak("max_negative_gap", -gap.gap);
    rec.check(gap.gap >= -1e-6 && gap.gap <= sc.delta + 1e-6,
              fmt::format("instance {} (N = {}): gap {:.6e}", s, side, gap.gap));
  }

  for (int s = 0; s < 10; ++s) {
    const int side = uniform_int(rng, 2, 4);
    const TransportProblem problem = random_problem(rng, side);
    const LpSolution lp = lp_oracle(problem);
    const VertexMinimum vm = vertex_enumeration_minimum(problem);
    const double err = std::abs(lp.cost - vm.cost);
    rec.peak("max_oracle_vertex_difference", err);
    rec.check(err <= 1e-12, fmt::format("oracle vs vertex enumeration {} (N = {}): {:.3e}", s, side, err));
    rec.check(lp.min_reduced_cost >= -1e-12 && lp.marginal_residual <= 1e-12,
              fmt::format("oracle certificate {}: reduced cost {:.3e}, residual {:.3e}", s, lp.min_reduced_cost,
                          lp.marginal_residual));
  }
  return rec.report();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"problem", "dual", "geometry", "bounds", "sweep"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyConfig& config) {
  if (name == "problem") return problem_suite(config);
  if (name == "dual") return dual_suite(config);
  if (name == "geometry") return geometry_suite(config);
  if (name == "bounds") return bounds_suite(config);
  if (name == "sweep") return sweep_suite(config);
  throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
}

}  // namespace memtp::verify
