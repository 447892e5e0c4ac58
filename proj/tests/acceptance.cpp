// Acceptance checks, one line per criterion:
//   [PASS] 3 closed-form 2x2 optimum: ...
// Exit status is the number of failed criteria.

#include "memtp/bounds.hpp"
#include "memtp/dual_solver.hpp"
#include "memtp/geometry.hpp"
#include "memtp/io.hpp"
#include "memtp/lp_oracle.hpp"
#include "memtp/sweep.hpp"
#include "memtp/verify.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <sys/wait.h>

using namespace memtp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failed = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++g_failed;
  fmt::print("[{}] {} {}: {} ({:.2f} s)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail, secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

TransportProblem canonical() {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  return TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), w);
}

Vector uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

BoxBounds random_box(std::mt19937_64& rng, Eigen::Index n, double min_width = 0.1) {
  std::uniform_real_distribution<double> lower(-1.0, 1.0), width(min_width, 2.0);
  BoxBounds b = BoxBounds::uniform(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    b.lower[k] = lower(rng);
    b.upper[k] = b.lower[k] + width(rng);
  }
  return b;
}

Outcome constraint_matrix() {
  const auto start = std::chrono::steady_clock::now();
  Matrix want(6, 9);
  want << 1, 1, 1, 0, 0, 0, 0, 0, 0,
          0, 0, 0, 1, 1, 1, 0, 0, 0,
          0, 0, 0, 0, 0, 0, 1, 1, 1,
          1, 0, 0, 1, 0, 0, 1, 0, 0,
          0, 1, 0, 0, 1, 0, 0, 1, 0,
          0, 0, 1, 0, 0, 1, 0, 0, 1;
  const bool exact = build_marginal_constraints(3) == want;
  int bad_rank = 0;
  for (int n = 2; n <= 10; ++n)
    if (verify::elimination_rank(build_marginal_constraints(n)) != 2 * n - 1) ++bad_rank;
  const double secs = seconds_since(start);
  return {exact && bad_rank == 0 && secs < 1.0,
          fmt::format("C(3) bit-exact = {}, rank != 2N-1 for {} of N = 2..10, {:.3f} s", exact, bad_rank, secs)};
}

Outcome feasibility_duality() {
  const auto start = std::chrono::steady_clock::now();
  auto rng = verify::make_rng(101, 2);
  double worst_res = 0.0, worst_gap = 0.0;
  int failed = 0;
  std::uniform_int_distribution<int> side_dist(2, 20);
  for (int s = 0; s < 100; ++s) {
    TransportProblem p = verify::random_problem(rng, side_dist(rng));
    p.cost_target = initial_cost(p.p, p.q, p.cost);
    const SolveOutcome out = solve_maxent(p);
    if (!out.converged()) {
      ++failed;
      continue;
    }
    worst_res = std::max(worst_res, out.solution->residual);
    worst_gap = std::max(worst_gap, std::abs(out.solution->entropy - out.solution->dual_value));
  }
  const double secs = seconds_since(start);
  return {failed == 0 && worst_res <= 1e-8 && worst_gap <= 1e-6 && secs < 60.0,
          fmt::format("100 instances, {} not converged, max residual {:.2e}, max |S - Sigma| {:.2e}, {:.1f} s", failed,
                      worst_res, worst_gap, secs)};
}

Outcome closed_form() {
  const SolveOutcome out = solve_maxent(TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5)));
  if (!out.converged()) return {false, fmt::format("status {}", to_string(out.status))};
  const double x_err = (out.solution->x.array() - 0.25).abs().maxCoeff();
  const double want = 4.0 * std::log(4.0 / 3.0) + std::log(3.0);
  const double d_err = std::abs(out.solution->dual_value - want);
  return {x_err <= 1e-8 && d_err <= 1e-9, fmt::format("max |x - 0.25| {:.2e}, dual value error {:.2e}", x_err, d_err)};
}

Outcome delta_guarantee() {
  const auto start = std::chrono::steady_clock::now();
  auto rng = verify::make_rng(104, 4);
  std::uniform_int_distribution<int> side_dist(2, 8);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int outside = 0;
  const double delta = 1e-2;
  for (int s = 0; s < 50; ++s) {
    const TransportProblem p = verify::random_problem(rng, side_dist(rng));
    SweepConfig config;
    config.delta = delta;
    const SweepResult r = run_sweep(p, config);
    const double gap = r.c_star - lp_oracle(p).cost;
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
    if (gap < -1e-6 || gap > delta + 1e-6) ++outside;
  }
  const double secs = seconds_since(start);
  return {outside == 0 && secs < 120.0,
          fmt::format("50 instances, gaps in [{:.3e}, {:.3e}], {} outside [-1e-6, delta + 1e-6], {:.1f} s", lo, hi,
                      outside, secs)};
}

Outcome geometry() {
  auto rng = verify::make_rng(105, 5);
  // (a) roundtrips
  double rt = 0.0;
  for (int m = 0; m <= 6000; ++m) {
    const double tau = -30.0 + 0.01 * m;
    rt = std::max(rt, std::abs(h_inverse(h_map(tau, 1.0), 1.0) - tau) / (1.0 + std::abs(tau)));
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0), z(-10.0, 10.0);
  for (int s = 0; s < 1000; ++s) {
    const BoxBounds b = random_box(rng, 1);
    const double a = b.lower[0], c = b.upper[0];
    double u = unit(rng);
    while (u == 0.0) u = unit(rng);
    const double xi = a + (c - a) * u;
    if (xi > a && xi < c) rt = std::max(rt, std::abs(xi_of_tau(tau_of_xi(xi, a, c), a, c) - xi));
    const double tau = z(rng) / (c - a);
    rt = std::max(rt, std::abs(tau_of_xi(xi_of_tau(tau, a, c), a, c) - tau) / (1.0 + std::abs(tau)));
  }
  // (b) quadrature against the closed form
  double quad = 0.0;
  for (int s = 0; s < 100; ++s) {
    const BoxBounds b = random_box(rng, 4);
    const GeometryContext ctx(b);
    const Vector t1 = uniform_vector(rng, 4, -30, 30), t2 = uniform_vector(rng, 4, -30, 30);
    double sq = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) {
      const double len = verify::coordinate_length_quadrature(t1[k], t2[k], b.width(k));
      sq += len * len;
    }
    quad = std::max(quad, std::abs(dist_tau(t1, t2, ctx) - std::sqrt(sq)) / std::sqrt(sq));
  }
  // (c) geodesic equation at grid step 1e-3 with a straight-line control
  double geo_res = 0.0, line_res = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 10; ++c) {
    const GeometryContext ctx(random_box(rng, 4, 0.5));
    const Vector t1 = uniform_vector(rng, 4, -4, -2), t2 = uniform_vector(rng, 4, 2, 4);
    std::vector<Vector> geo, line;
    for (int m = 0; m <= 1000; ++m) {
      const double t = m / 1000.0;
      geo.push_back(geodesic_tau(t1, t2, t, ctx));
      line.push_back(t1 + t * (t2 - t1));
    }
    geo_res = std::max(geo_res, geodesic_ode_residual(geo, 1e-3, ctx));
    line_res = std::min(line_res, geodesic_ode_residual(line, 1e-3, ctx));
  }
  // (d) d_G = d_M
  double eq = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const BoxBounds b = random_box(rng, 9);
    const GeometryContext ctx(b);
    Vector x1(9), x2(9);
    for (Eigen::Index k = 0; k < 9; ++k) {
      x1[k] = b.lower[k] + b.width(k) * (0.001 + 0.998 * unit(rng));
      x2[k] = b.lower[k] + b.width(k) * (0.001 + 0.998 * unit(rng));
    }
    const DistanceRecord r = distance_record(x1, x2, ctx);
    eq = std::max(eq, std::abs(r.d_M - r.d_G));
  }
  return {rt <= 1e-9 && quad <= 1e-6 && geo_res <= 1e-3 && line_res > 1e-2 && eq <= 1e-10,
          fmt::format("(a) roundtrip {:.2e} (b) quadrature rel {:.2e} (c) residual {:.2e}, straight line {:.2e} "
                      "(d) |d_M - d_G| {:.2e}",
                      rt, quad, geo_res, line_res, eq)};
}

Outcome bound_theorems() {
  std::string detail;
  bool pass = true;
  const std::pair<BoundFamily, const char*> families[] = {
      {BoundFamily::Exponent, "exponent"}, {BoundFamily::Pixel, "pixel"}, {BoundFamily::Solution, "solution"}};
  for (const auto& [family, name] : families) {
    BoundSampleConfig config;
    config.family = family;
    config.pairs = 10000;
    config.seed = 106;
    const BoundBatch batch = sample_bound_pairs(config);
    pass = pass && batch.violations == 0 && batch.reports.size() == 10000;
    detail += fmt::format("{}{} {} violations", detail.empty() ? "" : ", ", name, batch.violations);
  }
  return {pass, detail + " in 10^4 pairs each"};
}

Outcome derivatives() {
  auto rng = verify::make_rng(107, 7);
  std::uniform_int_distribution<int> side_dist(2, 6);
  double eg = 0.0, eh = 0.0;
  for (int s = 0; s < 20; ++s) {
    TransportProblem p = verify::random_problem(rng, side_dist(rng));
    p.bounds = random_box(rng, p.cells());
    const AugmentedSystem sys = augment_constraints(p, 0.4);
    const Vector lambda = uniform_vector(rng, sys.rows(), -1.0, 1.0);
    const Vector g = dual_gradient(lambda, sys, p.bounds);
    const Vector g_fd =
        verify::fd_gradient([&](const Vector& l) { return dual_objective(l, sys, p.bounds); }, lambda, 1e-5);
    const Matrix h = dual_hessian(lambda, sys, p.bounds);
    const Matrix h_fd =
        verify::fd_jacobian([&](const Vector& l) { return dual_gradient(l, sys, p.bounds); }, lambda, 1e-5);
    eg = std::max(eg, (g_fd - g).lpNorm<Eigen::Infinity>() / g.lpNorm<Eigen::Infinity>());
    eh = std::max(eh, (h_fd - h).lpNorm<Eigen::Infinity>() / h.lpNorm<Eigen::Infinity>());
  }
  return {eg <= 1e-5 && eh <= 1e-5, fmt::format("max rel. error gradient {:.2e}, Hessian {:.2e}", eg, eh)};
}

Outcome boundary() {
  TransportProblem p = canonical();
  p.cost_target = 0.0;
  const SolveOutcome out = solve_maxent(p);
  const bool pins = out.pins.size() == 4 && out.pins[1] == Pin::Lower && out.pins[2] == Pin::Lower;
  SweepConfig config;
  config.delta = 1e-3;
  const SweepResult sweep = run_sweep(canonical(), config);
  const double off = sweep.plan()[1] + sweep.plan()[2];
  return {out.status == SolveStatus::Boundary && pins && off <= 1e-2,
          fmt::format("c = 0 status {}, off-diagonal pins {}/{}, sweep (delta 1e-3) off-diagonal mass {:.2e}",
                      to_string(out.status), out.pins.size() == 4 ? to_string(out.pins[1]) : "-",
                      out.pins.size() == 4 ? to_string(out.pins[2]) : "-", off)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::current_path() / "acceptance_scratch";
  fs::create_directories(dir);
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string cmd = fmt::format("TRANSPORT_LOG=error {} verify --seed 20170321 --out {} 2>/dev/null",
                                        MEMTP_CLI_PATH, (dir / fmt::format("verify{}.json", k)).string());
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = io::read_file(dir / "verify0.json"), b = io::read_file(dir / "verify1.json");
  return {a == b && !a.empty() && codes[0] == 0 && codes[1] == 0,
          fmt::format("exit codes {} and {}, reports {} ({} bytes)", codes[0], codes[1],
                      a == b ? "byte-identical" : "differ", a.size())};
}

}  // namespace

int main() {
  criterion(1, "constraint-matrix fidelity", constraint_matrix);
  criterion(2, "feasibility and strong duality", feasibility_duality);
  criterion(3, "closed-form 2x2 optimum", closed_form);
  criterion(4, "delta-guarantee against the simplex oracle", delta_guarantee);
  criterion(5, "geometry", geometry);
  criterion(6, "distance bound theorems", bound_theorems);
  criterion(7, "derivative checks", derivatives);
  criterion(8, "boundary behaviour", boundary);
  criterion(9, "verify determinism", determinism);
  fmt::print("{} of 9 criteria failed\n", g_failed);
  return g_failed;
}
