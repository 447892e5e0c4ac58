#include "memtp/bounds.hpp"

#include <doctest.h>

#include <numbers>

using namespace memtp;

TEST_SUITE("bounds") {
  TEST_CASE("equal points give zero on both sides") {
    const GeometryContext ctx = GeometryContext::uniform(4);
    const Vector t = Vector::LinSpaced(4, -3.0, 2.0);
    const BoundReport r = check_bounds_tau(t, t, ctx);
    CHECK(r.lhs_l2 == 0.0);
    CHECK(r.rhs_geodesic == 0.0);
    CHECK(r.naive_rhs == 0.0);
    CHECK(r.satisfied());
    const Vector x = Vector::Constant(4, 0.3);
    CHECK(check_bounds_pixel(x, x, ctx).lhs_sup == 0.0);
  }

  TEST_CASE("far-apart exponents: geodesic bound is bounded, naive bound is not") {
    const GeometryContext ctx = GeometryContext::uniform(9);
    const BoundReport r = check_bounds_tau(Vector::Constant(9, -30.0), Vector::Constant(9, 30.0), ctx);
    CHECK(r.satisfied());
    CHECK(r.L == 1.0);
    CHECK(r.rhs_geodesic <= 0.5 * std::numbers::pi * 3.0);
    CHECK(r.naive_rhs > 10 * r.rhs_geodesic);
    CHECK(r.lhs_l1_scaled <= r.lhs_l2);
  }

  TEST_CASE("pixel bounds equal exponent bounds at pulled-back points") {
    BoxBounds box = BoxBounds::uniform(4, -0.5, 0.7);
    const GeometryContext ctx(box);
    Vector x1(4), x2(4);
    x1 << -0.4, 0.0, 0.3, 0.69;
    x2 << 0.6, -0.45, 0.1, 0.2;
    const BoundReport a = check_bounds_pixel(x1, x2, ctx);
    const BoundReport b = check_bounds_tau(ctx.tau_of(x1), ctx.tau_of(x2), ctx);
    CHECK(a.rhs_geodesic == doctest::Approx(b.rhs_geodesic).epsilon(1e-10));
    CHECK(a.lhs_l2 == doctest::Approx(b.lhs_l2).epsilon(1e-10));
    CHECK(a.satisfied());
  }

  TEST_CASE("sampled batches have no violations and do not depend on threads") {
    for (BoundFamily family : {BoundFamily::Exponent, BoundFamily::Pixel, BoundFamily::Solution}) {
      BoundSampleConfig config;
      config.family = family;
      config.pairs = 500;
      config.seed = 99;
      const BoundBatch par = sample_bound_pairs(config);
      config.policy = ExecPolicy::Serial;
      const BoundBatch ser = sample_bound_pairs(config);
      CHECK(par.violations == 0);
      CHECK(par.naive_violations == 0);
      REQUIRE(par.reports.size() == ser.reports.size());
      bool same = true;
      for (std::size_t k = 0; k < par.reports.size(); ++k)
        same = same && par.reports[k].lhs_l2 == ser.reports[k].lhs_l2 &&
               par.reports[k].rhs_geodesic == ser.reports[k].rhs_geodesic;
      CHECK(same);
    }
  }

  TEST_CASE("diverging multipliers keep the bound finite") {
    const AugmentedSystem sys(2, Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), Vector::LinSpaced(4, 0, 1), 0.0, {});
    const GeometryContext ctx = GeometryContext::uniform(4);
    const Vector l1 = Vector::Zero(sys.rows());
    Vector l2 = Vector::Zero(sys.rows());
    l2[4] = 1e6;
    const BoundReport r = check_bounds_solutions(l1, l2, sys, ctx);
    CHECK(std::isfinite(r.rhs_geodesic));
    CHECK(r.rhs_geodesic <= std::numbers::pi);
    CHECK(r.satisfied());
  }
}
