#include "memtp/geometry.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memtp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundarySlack = 1e-12;

void require_width(double width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::domain_error(fmt::format("box width must be positive and finite, got {:.17g}", width));
}

}  // namespace

double h_map(double tau, double width) {
  require_width(width);
  const double z = 0.5 * width * tau;
  if (z <= 0.0) return 2.0 * std::atan(std::exp(z));
  return kPi - 2.0 * std::atan(std::exp(-z));
}

double h_inverse(double w, double width) {
  require_width(width);
  if (!(w > 1e-300) || w > kPi + kBoundarySlack)
    throw std::domain_error(fmt::format("h_inverse argument {:.17g} outside (0, pi)", w));
  if (w >= kPi) w = std::nextafter(kPi, 0.0);
  if (w <= 0.5 * kPi) return (2.0 / width) * std::log(std::tan(0.5 * w));
  return -(2.0 / width) * std::log(std::tan(0.5 * (kPi - w)));
}

double hessian_metric(double tau, double width) {
  require_width(width);
  const double e = std::exp(-std::abs(width * tau));
  const double s = 1.0 + e;
  return width * width * e / (s * s);
}

double hessian_metric_derivative(double tau, double width) {
  return -width * std::tanh(0.5 * width * tau) * hessian_metric(tau, width);
}

double xi_of_tau(double tau, double a, double b) {
  require_width(b - a);
  return two_point::mean(tau, a, b);
}

double tau_of_xi(double xi, double a, double b) {
  require_width(b - a);
  if (!(xi > a && xi < b))
    throw std::domain_error(fmt::format("xi = {:.17g} is not strictly inside ({:.17g}, {:.17g})", xi, a, b));
  return (std::log(b - xi) - std::log(xi - a)) / (b - a);
}

double k_map(double xi, double a, double b) {
  const double width = b - a;
  require_width(width);
  if (!(xi >= a && xi <= b))
    throw std::domain_error(fmt::format("xi = {:.17g} outside [{:.17g}, {:.17g}]", xi, a, b));
  const double arg = std::clamp(((xi - a) - (b - xi)) / width, -1.0, 1.0);
  return std::asin(arg) + 0.5 * kPi;
}

double pixel_metric(double xi, double a, double b) {
  require_width(b - a);
  if (!(xi > a && xi < b))
    throw std::domain_error(fmt::format("xi = {:.17g} is not strictly inside ({:.17g}, {:.17g})", xi, a, b));
  return 1.0 / ((b - xi) * (xi - a));
}

GeometryContext::GeometryContext(BoxBounds bounds) : bounds_(std::move(bounds)) {
  if (bounds_.lower.size() != bounds_.upper.size())
    throw std::invalid_argument("lower and upper bounds differ in length");
  for (Eigen::Index k = 0; k < bounds_.size(); ++k)
    if (!(bounds_.width(k) > 0.0) || !std::isfinite(bounds_.width(k)))
      throw std::invalid_argument(
          fmt::format("geometry needs a_n < b_n; coordinate {} has [{:.17g}, {:.17g}]", k + 1,
                      bounds_.lower[k], bounds_.upper[k]));
}

GeometryContext GeometryContext::uniform(Eigen::Index size, double lo, double hi) {
  return GeometryContext(BoxBounds::uniform(size, lo, hi));
}

double GeometryContext::interior(Eigen::Index k, double xi) const {
  const double a = lower(k), b = upper(k), nudge = kBoundarySlack * width(k);
  if (!(xi >= a - nudge && xi <= b + nudge))
    throw std::domain_error(
        fmt::format("coordinate {}: xi = {:.17g} outside ({:.17g}, {:.17g})", k + 1, xi, a, b));
  return std::clamp(xi, a + nudge, b - nudge);
}

void GeometryContext::check(const Vector& v) const {
  if (v.size() != size())
    throw std::invalid_argument(fmt::format("point has {} coordinates, context has {}", v.size(), size()));
}

Vector GeometryContext::h(const Vector& tau) const {
  check(tau);
  Vector w(tau.size());
  for (Eigen::Index k = 0; k < tau.size(); ++k) w[k] = h_map(tau[k], width(k));
  return w;
}

Vector GeometryContext::k(const Vector& xi) const {
  check(xi);
  Vector w(xi.size());
  for (Eigen::Index n = 0; n < xi.size(); ++n) w[n] = k_map(interior(n, xi[n]), lower(n), upper(n));
  return w;
}

Vector GeometryContext::xi_of(const Vector& tau) const {
  check(tau);
  Vector xi(tau.size());
  for (Eigen::Index k = 0; k < tau.size(); ++k) xi[k] = xi_of_tau(tau[k], lower(k), upper(k));
  return xi;
}

Vector GeometryContext::tau_of(const Vector& xi) const {
  check(xi);
  Vector tau(xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k) tau[k] = tau_of_xi(interior(k, xi[k]), lower(k), upper(k));
  return tau;
}

Vector geodesic_tau(const Vector& tau1, const Vector& tau2, double t, const GeometryContext& ctx) {
  if (tau1.size() != ctx.size() || tau2.size() != ctx.size())
    throw std::invalid_argument("geodesic endpoints do not match the context size");
  if (t == 0.0) return tau1;
  if (t == 1.0) return tau2;
  Vector out(tau1.size());
  for (Eigen::Index k = 0; k < tau1.size(); ++k) {
    const double d = ctx.width(k);
    const double w1 = h_map(tau1[k], d);
    const double kappa = h_map(tau2[k], d) - w1;
    out[k] = kappa == 0.0 ? tau1[k] : h_inverse(w1 + t * kappa, d);
  }
  return out;
}

double dist_tau(const Vector& tau1, const Vector& tau2, const GeometryContext& ctx) {
  return (ctx.h(tau2) - ctx.h(tau1)).norm();
}

double dist_pixel(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx) {
  return (ctx.k(xi1) - ctx.k(xi2)).norm();
}

double geodesic_ode_residual(const std::vector<Vector>& curve, double step, const GeometryContext& ctx) {
  if (curve.size() < 10) throw std::invalid_argument("geodesic residual needs at least 10 samples");
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  for (const auto& p : curve)
    if (p.size() != ctx.size()) throw std::invalid_argument("curve sample does not match the context size");
  double worst = 0.0;
  // Fourth-order central stencils: the second-order truncation error grows
  // like e^{D|tau|} towards the saturated ends of a geodesic.
  for (std::size_t m = 2; m + 2 < curve.size(); ++m) {
    for (Eigen::Index k = 0; k < ctx.size(); ++k) {
      const double f0 = curve[m - 2][k], f1 = curve[m - 1][k], here = curve[m][k];
      const double f3 = curve[m + 1][k], f4 = curve[m + 2][k];
      const double velocity = (f0 - 8.0 * f1 + 8.0 * f3 - f4) / (12.0 * step);
      const double accel = (-f0 + 16.0 * f1 - 30.0 * here + 16.0 * f3 - f4) / (12.0 * step * step);
      const double d = ctx.width(k);
      const double r = hessian_metric(here, d) * accel + 0.5 * hessian_metric_derivative(here, d) * velocity * velocity;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

Vector interpolate_plans(const Vector& lambda1, const Vector& lambda2, double t,
                         const AugmentedSystem& system, const GeometryContext& ctx) {
  if (ctx.size() != system.cols()) throw std::invalid_argument("context size does not match the system");
  const Vector tau1 = system.apply_transpose(lambda1);
  const Vector tau2 = system.apply_transpose(lambda2);
  return ctx.xi_of(geodesic_tau(tau1, tau2, t, ctx));
}

DistanceRecord distance_record(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx) {
  const Vector h1 = ctx.h(ctx.tau_of(xi1));
  const Vector h2 = ctx.h(ctx.tau_of(xi2));
  const Vector k1 = ctx.k(xi1);
  const Vector k2 = ctx.k(xi2);
  DistanceRecord rec;
  rec.per_coordinate.reserve(static_cast<std::size_t>(ctx.size()));
  for (Eigen::Index n = 0; n < ctx.size(); ++n) rec.per_coordinate.push_back({n, h2[n] - h1[n], k2[n] - k1[n]});
  rec.d_M = (h2 - h1).norm();
  rec.d_G = (k2 - k1).norm();
  return rec;
}

}  // namespace memtp
