#pragma once

#include "memtp/problem.hpp"

#include <vector>

namespace memtp {

// Scalar maps of one coordinate with box [a, b], width D = b - a.

/// h(tau) = 2 arctan(e^{D tau / 2}), strictly increasing onto (0, pi).
double h_map(double tau, double width);
/// Inverse of h_map: tau = (2 / D) ln tan(w / 2). Throws std::domain_error
/// for w <= 1e-300 or w >= pi (values up to 1e-12 past pi are clamped).
double h_inverse(double w, double width);
/// M''(tau) = (D / (e^{D tau/2} + e^{-D tau/2}))^2 = h'(tau)^2.
double hessian_metric(double tau, double width);
/// d/dtau of hessian_metric.
double hessian_metric_derivative(double tau, double width);
/// xi(tau) = (a e^{-a tau} + b e^{-b tau}) / (e^{-a tau} + e^{-b tau}).
double xi_of_tau(double tau, double a, double b);
/// tau(xi) = ln((b - xi) / (xi - a)) / D, for a < xi < b.
double tau_of_xi(double xi, double a, double b);
/// k(xi) = arcsin((2 / D)(xi - S)) + pi / 2 on [a, b], S = (a + b) / 2.
double k_map(double xi, double a, double b);
/// g(xi) = 1 / ((b - xi)(xi - a)).
double pixel_metric(double xi, double a, double b);

/// Per-coordinate boxes of the Hessian metric. Every box must have positive width.
class GeometryContext {
 public:
  explicit GeometryContext(BoxBounds bounds);
  static GeometryContext uniform(Eigen::Index size, double lo = 0.0, double hi = 1.0);

  Eigen::Index size() const { return bounds_.size(); }
  double lower(Eigen::Index k) const { return bounds_.lower[k]; }
  double upper(Eigen::Index k) const { return bounds_.upper[k]; }
  double width(Eigen::Index k) const { return bounds_.width(k); }
  double center(Eigen::Index k) const { return 0.5 * (bounds_.lower[k] + bounds_.upper[k]); }
  /// L = sup_n (b_n - a_n).
  double max_width() const { return bounds_.max_width(); }
  const BoxBounds& bounds() const { return bounds_; }

  /// Moves xi within 1e-12 D of a bound to 1e-12 D inside it; throws
  /// std::domain_error beyond that.
  double interior(Eigen::Index k, double xi) const;

  Vector h(const Vector& tau) const;
  Vector k(const Vector& xi) const;
  Vector xi_of(const Vector& tau) const;
  Vector tau_of(const Vector& xi) const;

 private:
  void check(const Vector& v) const;
  BoxBounds bounds_;
};

/// tau_n(t) = H_n(h_n(tau1_n) + t (h_n(tau2_n) - h_n(tau1_n))). Returns the
/// endpoints exactly at t = 0 and t = 1.
Vector geodesic_tau(const Vector& tau1, const Vector& tau2, double t, const GeometryContext& ctx);

/// d_M = sqrt(sum_n (h_n(tau2_n) - h_n(tau1_n))^2).
double dist_tau(const Vector& tau1, const Vector& tau2, const GeometryContext& ctx);

/// d_G = sqrt(sum_n (k_n(xi1_n) - k_n(xi2_n))^2), interior points only.
double dist_pixel(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx);

/// Max over interior grid points and coordinates of
/// |M'' tau'' + 0.5 (M'')' tau'^2|, derivatives by fourth-order central
/// differences at spacing `step`.
/// Throws for fewer than 10 samples.
double geodesic_ode_residual(const std::vector<Vector>& curve, double step, const GeometryContext& ctx);

/// Plan on the geodesic between the maxent plans of lambda1 and lambda2.
Vector interpolate_plans(const Vector& lambda1, const Vector& lambda2, double t,
                         const AugmentedSystem& system, const GeometryContext& ctx);

struct CoordinateDistance {
  Eigen::Index n = 0;  // 0-based
  double dh = 0.0;     // h(tau(xi2)) - h(tau(xi1))
  double dk = 0.0;     // k(xi2) - k(xi1)
};

struct DistanceRecord {
  double d_M = 0.0;
  double d_G = 0.0;
  std::vector<CoordinateDistance> per_coordinate;
};

/// Both distances between two interior plans, d_M computed through tau(xi).
DistanceRecord distance_record(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx);

}  // namespace memtp
