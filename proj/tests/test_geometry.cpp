#include "memtp/geometry.hpp"
#include "memtp/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace memtp;

TEST_SUITE("geometry") {
  TEST_CASE("h maps onto (0, pi) and inverts") {
    CHECK(h_map(0.0, 1.0) == doctest::Approx(std::numbers::pi / 2));
    CHECK(h_map(-60.0, 1.0) > 0.0);
    CHECK(h_map(60.0, 1.0) < std::numbers::pi);
    for (double tau = -30.0; tau <= 30.0; tau += 0.37)
      CHECK(std::abs(h_inverse(h_map(tau, 1.0), 1.0) - tau) <= 1e-9 * (1 + std::abs(tau)));
    for (double d : {0.1, 0.7, 2.0})
      for (double tau : {-3.0, 0.5, 4.0}) CHECK(h_inverse(h_map(tau, d), d) == doctest::Approx(tau).epsilon(1e-12));
    CHECK_THROWS_AS(h_inverse(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(h_inverse(3.5, 1.0), std::domain_error);
    CHECK(std::isfinite(h_inverse(std::numbers::pi, 1.0)));
  }

  TEST_CASE("h' squared is the Hessian metric") {
    for (double d : {0.3, 1.0, 1.9})
      for (double tau : {-5.0, -0.4, 0.0, 2.5}) {
        const double step = 1e-5;
        const double dh = (h_map(tau + step, d) - h_map(tau - step, d)) / (2 * step);
        CHECK(dh * dh == doctest::Approx(hessian_metric(tau, d)).epsilon(1e-8));
        const double dm = (hessian_metric(tau + step, d) - hessian_metric(tau - step, d)) / (2 * step);
        CHECK(dm == doctest::Approx(hessian_metric_derivative(tau, d)).epsilon(1e-6));
      }
  }

  TEST_CASE("exponent and pixel coordinates roundtrip") {
    const double a = -0.3, b = 1.4;
    for (double u = 0.01; u < 1.0; u += 0.07) {
      const double xi = a + (b - a) * u;
      CHECK(std::abs(xi_of_tau(tau_of_xi(xi, a, b), a, b) - xi) <= 1e-12);
    }
    for (double z = -10.0; z <= 10.0; z += 0.5) {
      const double tau = z / (b - a);
      CHECK(std::abs(tau_of_xi(xi_of_tau(tau, a, b), a, b) - tau) <= 1e-9 * (1 + std::abs(tau)));
    }
    CHECK_THROWS_AS(tau_of_xi(a, a, b), std::domain_error);
    CHECK_THROWS_AS(pixel_metric(b, a, b), std::domain_error);
    CHECK(k_map(a, a, b) == doctest::Approx(0.0));
    CHECK(k_map(b, a, b) == doctest::Approx(std::numbers::pi));
  }

  TEST_CASE("h of the exponent is pi minus k of the plan") {
    const double a = 0.2, b = 0.9;
    for (double tau = -8.0; tau <= 8.0; tau += 0.5)
      CHECK(h_map(tau, b - a) == doctest::Approx(std::numbers::pi - k_map(xi_of_tau(tau, a, b), a, b)).epsilon(1e-12));
  }

  TEST_CASE("geodesic endpoints, midpoints and distances") {
    BoxBounds box = BoxBounds::uniform(3);
    box.lower[1] = -1.0;
    box.upper[2] = 2.5;
    const GeometryContext ctx(box);
    Vector t1(3), t2(3);
    t1 << -2.0, 0.5, 7.0;
    t2 << 3.0, -4.0, 0.0;
    CHECK(geodesic_tau(t1, t2, 0.0, ctx) == t1);
    CHECK(geodesic_tau(t1, t2, 1.0, ctx) == t2);
    const double d = dist_tau(t1, t2, ctx);
    // The geodesic is parametrised proportionally to arc length.
    const Vector mid = geodesic_tau(t1, t2, 0.5, ctx);
    CHECK(dist_tau(t1, mid, ctx) == doctest::Approx(0.5 * d).epsilon(1e-12));
    CHECK(dist_tau(t1, t1, ctx) == 0.0);
    CHECK(dist_pixel(ctx.xi_of(t1), ctx.xi_of(t2), ctx) == doctest::Approx(d).epsilon(1e-10));
    CHECK(d <= std::numbers::pi * std::sqrt(3.0));
  }

  TEST_CASE("closed-form distance agrees with quadrature") {
    for (double d : {0.1, 1.0, 2.0})
      for (auto [t1, t2] : {std::pair{-30.0, 30.0}, std::pair{0.2, 0.3}, std::pair{5.0, -2.0}}) {
        const double want = verify::coordinate_length_quadrature(t1, t2, d);
        const double got = std::abs(h_map(t2, d) - h_map(t1, d));
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
      }
  }

  TEST_CASE("geodesics satisfy the geodesic equation, straight lines do not") {
    const GeometryContext ctx = GeometryContext::uniform(2, 0.0, 1.5);
    Vector t1(2), t2(2);
    t1 << -4.0, -2.5;
    t2 << 3.0, 5.0;
    std::vector<Vector> geo, line;
    const int steps = 1000;
    for (int m = 0; m <= steps; ++m) {
      const double t = double(m) / steps;
      geo.push_back(geodesic_tau(t1, t2, t, ctx));
      line.push_back(t1 + t * (t2 - t1));
    }
    CHECK(geodesic_ode_residual(geo, 1.0 / steps, ctx) <= 1e-3);
    CHECK(geodesic_ode_residual(line, 1.0 / steps, ctx) > 1e-2);
    CHECK_THROWS(geodesic_ode_residual(std::vector<Vector>(5, t1), 0.1, ctx));
  }

  TEST_CASE("context rejects degenerate boxes and nudges boundary points") {
    BoxBounds flat = BoxBounds::uniform(2);
    flat.upper[0] = 0.0;
    CHECK_THROWS_AS(GeometryContext{flat}, std::invalid_argument);
    const GeometryContext ctx = GeometryContext::uniform(2);
    CHECK(ctx.interior(0, 0.0) == doctest::Approx(1e-12));
    CHECK(ctx.interior(0, 1.0) < 1.0);
    CHECK_THROWS_AS(ctx.interior(0, 1.1), std::domain_error);
    Vector x(2);
    x << 0.0, 0.5;
    CHECK(std::isfinite(ctx.tau_of(x)[0]));
  }

  TEST_CASE("distance record lists both coordinate differences") {
    const GeometryContext ctx = GeometryContext::uniform(4);
    Vector a(4), b(4);
    a << 0.1, 0.2, 0.3, 0.4;
    b << 0.4, 0.3, 0.2, 0.1;
    const DistanceRecord r = distance_record(a, b, ctx);
    REQUIRE(r.per_coordinate.size() == 4);
    CHECK(r.d_M == doctest::Approx(r.d_G).epsilon(1e-12));
    for (const auto& c : r.per_coordinate) CHECK(c.dh == doctest::Approx(-c.dk).epsilon(1e-10));
    CHECK(distance_record(a, a, ctx).d_G == 0.0);
  }

  TEST_CASE("interpolated plans run from one solution to the other") {
    const AugmentedSystem sys(2, Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), std::nullopt, std::nullopt, {});
    const GeometryContext ctx = GeometryContext::uniform(4);
    const Vector l1 = Vector::LinSpaced(4, -1.0, 1.0), l2 = Vector::LinSpaced(4, 2.0, -0.5);
    CHECK((interpolate_plans(l1, l2, 0.0, sys, ctx) - ctx.xi_of(sys.apply_transpose(l1))).norm() <= 1e-15);
    CHECK((interpolate_plans(l1, l2, 1.0, sys, ctx) - ctx.xi_of(sys.apply_transpose(l2))).norm() <= 1e-15);
    const Vector mid = interpolate_plans(l1, l2, 0.5, sys, ctx);
    CHECK((mid.array() > 0).all());
    CHECK((mid.array() < 1).all());
  }
}
