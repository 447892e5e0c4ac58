#include "memtp/sweep.hpp"
#include "memtp/verify.hpp"

#include <doctest.h>

using namespace memtp;

namespace {

TransportProblem canonical() {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  return TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), w);
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("canonical instance stops one step above the minimum") {
    SweepConfig config;
    config.delta = 0.05;
    const SweepResult r = run_sweep(canonical(), config);
    CHECK(r.c0 == doctest::Approx(0.5));
    CHECK(r.n_star == 9);
    CHECK(r.c_star == doctest::Approx(0.05).epsilon(1e-12));
    REQUIRE(r.trace.size() == 11);
    for (int n = 0; n <= r.n_star; ++n) {
      CHECK(r.trace[n].status == SolveStatus::Converged);
      CHECK(std::abs(r.trace[n].achieved_cost - r.trace[n].c) <= 1e-8);
      CHECK(std::isfinite(r.trace[n].entropy));
    }
    CHECK(r.trace.back().status == SolveStatus::Boundary);
    CHECK(std::isnan(r.trace.back().entropy));
    CHECK(r.plan()[1] + r.plan()[2] == doctest::Approx(0.05).epsilon(1e-8));

    const GapReport gap = gap_report(r, lp_oracle(canonical()));
    CHECK(gap.gap == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(gap.within);
  }

  TEST_CASE("bisection narrows the last feasible cost") {
    SweepConfig config;
    config.delta = 0.05;
    config.bisect = true;
    const SweepResult r = run_sweep(canonical(), config);
    CHECK_FALSE(r.refinement.empty());
    CHECK(r.c_star < 0.05);
    CHECK(r.c_star >= 0.0);
    CHECK(r.c_star <= 0.05 / 100 + 1e-12);
  }

  TEST_CASE("constant cost stops at the first step") {
    const TransportProblem p = TransportProblem::make(Vector::Constant(3, 1.0 / 3), Vector::Constant(3, 1.0 / 3),
                                                      Matrix::Constant(3, 3, 0.4));
    const SweepResult r = run_sweep(p, {});
    CHECK(r.n_star == 0);
    REQUIRE(r.trace.size() == 2);
    CHECK(r.trace[1].status == SolveStatus::Infeasible);
    CHECK(std::abs(gap_report(r, lp_oracle(p)).gap) <= 1e-8);
  }

  TEST_CASE("random instances stay within delta of the oracle") {
    auto rng = verify::make_rng(8, 8);
    for (int s = 0; s < 6; ++s) {
      const TransportProblem p = verify::random_problem(rng, 2 + s);
      SweepConfig config;
      config.delta = 1e-2;
      const SweepResult r = run_sweep(p, config);
      const GapReport gap = gap_report(r, lp_oracle(p));
      CAPTURE(s);
      CHECK(gap.gap >= -1e-6);
      CHECK(gap.gap <= config.delta + 1e-6);
    }
  }

  TEST_CASE("errors") {
    TransportProblem no_cost = TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
    CHECK_THROWS_AS(run_sweep(no_cost, {}), std::invalid_argument);
    SweepConfig bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(run_sweep(canonical(), bad), std::invalid_argument);
    SweepConfig short_budget;
    short_budget.delta = 1e-3;
    short_budget.max_steps = 5;
    CHECK_THROWS_AS(run_sweep(canonical(), short_budget), SweepError);
    SweepConfig outside;
    outside.c_start = 2.0;
    CHECK_THROWS_AS(run_sweep(canonical(), outside), SweepError);
  }

  TEST_CASE("pin distance only counts cells near a bound") {
    const BoxBounds box = BoxBounds::uniform(3);
    Vector x(3);
    x << 0.001, 0.5, 0.995;
    CHECK(max_pin_distance(x, box, 0.01) == doctest::Approx(0.005));
    CHECK(max_pin_distance(x, box, 0.002) == doctest::Approx(0.001));
    CHECK(max_pin_distance(x, box, 1e-4) == 0.0);
  }
}
