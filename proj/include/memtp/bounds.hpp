#pragma once

#include "memtp/geometry.hpp"

#include <cstdint>
#include <vector>

namespace memtp {

/// Left sides are distances between the plans xi(tau1), xi(tau2); right sides
/// are the geodesic bounds. All three inequality flags use an absolute plus
/// relative slack of 1e-12.
struct BoundReport {
  double lhs_l2 = 0.0;         // ||dxi||_2
  double lhs_l1_scaled = 0.0;  // ||dxi||_1 / N, N = sqrt(number of cells)
  double lhs_sup = 0.0;        // max_n |dxi_n|
  double rhs_geodesic = 0.0;   // (L/2) d_M  (or d_G)
  double rhs_sup = 0.0;        // (L/2) max_n |dh_n|  (or |dk_n|)
  double L = 0.0;              // sup_n (b_n - a_n)
  double naive_rhs = 0.0;      // (L/2) ||tau1 - tau2||_2
  bool l2_ok = true;
  bool l1_ok = true;
  bool sup_ok = true;
  bool naive_ok = true;

  bool satisfied() const { return l2_ok && l1_ok && sup_ok; }
};

inline constexpr double kBoundSlack = 1e-12;

/// Distance bounds in exponent coordinates.
BoundReport check_bounds_tau(const Vector& tau1, const Vector& tau2, const GeometryContext& ctx);

/// Same bounds stated with d_G and k-differences, for interior plans.
BoundReport check_bounds_pixel(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx);

/// Bounds between the maxent plans xi(A^t lambda1) and xi(A^t lambda2).
BoundReport check_bounds_solutions(const Vector& lambda1, const Vector& lambda2,
                                   const AugmentedSystem& system, const GeometryContext& ctx);

enum class BoundFamily { Exponent, Pixel, Solution };

struct BoundSampleConfig {
  BoundFamily family = BoundFamily::Exponent;
  int side = 3;
  std::size_t pairs = 1000;
  std::uint64_t seed = 1;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct BoundBatch {
  BoundFamily family = BoundFamily::Exponent;
  std::uint64_t seed = 0;
  std::vector<BoundReport> reports;
  std::size_t violations = 0;        // pairs with a failed inequality
  std::size_t naive_violations = 0;  // should also stay 0
};

/// Random pairs: boxes with a ~ U[-1, 1] and width ~ U[0.1, 2]; exponents
/// ~ U[-30, 30]; interior points ~ a + width U(0, 1); multipliers ~ U[-5, 5]
/// over a random cost row. Each pair draws from its own generator seeded by
/// (seed, family, pair index), so results do not depend on the schedule.
BoundBatch sample_bound_pairs(const BoundSampleConfig& config);

}  // namespace memtp
