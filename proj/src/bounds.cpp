#include "memtp/bounds.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace memtp {
namespace {

bool within(double lhs, double rhs) { return lhs <= rhs + kBoundSlack + kBoundSlack * std::abs(rhs); }

// Shared tail of the exponent and pixel reports: dxi is the plan difference,
// dgeo the per-coordinate geodesic coordinate difference (dh or dk).
BoundReport make_report(const Vector& dxi, const Vector& dgeo, double naive_norm, double L) {
  BoundReport r;
  const double side = std::sqrt(static_cast<double>(dxi.size()));
  r.L = L;
  r.lhs_l2 = dxi.norm();
  r.lhs_l1_scaled = dxi.lpNorm<1>() / side;
  r.lhs_sup = dxi.size() ? dxi.lpNorm<Eigen::Infinity>() : 0.0;
  r.rhs_geodesic = 0.5 * L * dgeo.norm();
  r.rhs_sup = 0.5 * L * (dgeo.size() ? dgeo.lpNorm<Eigen::Infinity>() : 0.0);
  r.naive_rhs = 0.5 * L * naive_norm;
  r.l2_ok = within(r.lhs_l2, r.rhs_geodesic);
  r.l1_ok = within(r.lhs_l1_scaled, r.rhs_geodesic);
  r.sup_ok = within(r.lhs_sup, r.rhs_sup);
  r.naive_ok = within(r.lhs_l2, r.naive_rhs);
  return r;
}

}  // namespace

BoundReport check_bounds_tau(const Vector& tau1, const Vector& tau2, const GeometryContext& ctx) {
  const Vector dxi = ctx.xi_of(tau1) - ctx.xi_of(tau2);
  const Vector dh = ctx.h(tau1) - ctx.h(tau2);
  return make_report(dxi, dh, (tau1 - tau2).norm(), ctx.max_width());
}

BoundReport check_bounds_pixel(const Vector& xi1, const Vector& xi2, const GeometryContext& ctx) {
  Vector p1(xi1.size()), p2(xi2.size());
  if (xi1.size() != ctx.size() || xi2.size() != ctx.size())
    throw std::invalid_argument("points do not match the context size");
  for (Eigen::Index k = 0; k < ctx.size(); ++k) {
    p1[k] = ctx.interior(k, xi1[k]);
    p2[k] = ctx.interior(k, xi2[k]);
  }
  const Vector dk = ctx.k(p1) - ctx.k(p2);
  return make_report(p1 - p2, dk, (ctx.tau_of(p1) - ctx.tau_of(p2)).norm(), ctx.max_width());
}

BoundReport check_bounds_solutions(const Vector& lambda1, const Vector& lambda2,
                                   const AugmentedSystem& system, const GeometryContext& ctx) {
  if (ctx.size() != system.cols()) throw std::invalid_argument("context size does not match the system");
  return check_bounds_tau(system.apply_transpose(lambda1), system.apply_transpose(lambda2), ctx);
}

BoundBatch sample_bound_pairs(const BoundSampleConfig& config) {
  if (config.side < 1) throw std::invalid_argument("grid side must be positive");
  const Eigen::Index cells = Eigen::Index(config.side) * config.side;
  BoundBatch batch;
  batch.family = config.family;
  batch.seed = config.seed;
  batch.reports.resize(config.pairs);
  const auto family_tag = static_cast<std::uint32_t>(config.family);
  const auto count = static_cast<std::int64_t>(config.pairs);

#pragma omp parallel for schedule(static) if (config.policy == ExecPolicy::Parallel)
  for (std::int64_t pair = 0; pair < count; ++pair) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      family_tag, static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> lower_dist(-1.0, 1.0), width_dist(0.1, 2.0);
    BoxBounds box = BoxBounds::uniform(cells);
    for (Eigen::Index k = 0; k < cells; ++k) {
      box.lower[k] = lower_dist(rng);
      box.upper[k] = box.lower[k] + width_dist(rng);
    }
    const GeometryContext ctx(box);
    BoundReport report;
    switch (config.family) {
      case BoundFamily::Exponent: {
        std::uniform_real_distribution<double> tau_dist(-30.0, 30.0);
        Vector t1(cells), t2(cells);
        for (Eigen::Index k = 0; k < cells; ++k) t1[k] = tau_dist(rng);
        for (Eigen::Index k = 0; k < cells; ++k) t2[k] = tau_dist(rng);
        report = check_bounds_tau(t1, t2, ctx);
        break;
      }
      case BoundFamily::Pixel: {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Vector x1(cells), x2(cells);
        auto draw = [&](Eigen::Index k) {
          double u = unit(rng);
          while (u == 0.0) u = unit(rng);
          return box.lower[k] + box.width(k) * u;
        };
        for (Eigen::Index k = 0; k < cells; ++k) x1[k] = draw(k);
        for (Eigen::Index k = 0; k < cells; ++k) x2[k] = draw(k);
        report = check_bounds_pixel(x1, x2, ctx);
        break;
      }
      case BoundFamily::Solution: {
        std::uniform_real_distribution<double> unit(0.0, 1.0), lambda_dist(-5.0, 5.0);
        Vector w(cells);
        for (Eigen::Index k = 0; k < cells; ++k) w[k] = unit(rng);
        const Vector marginal = Vector::Constant(config.side, 1.0 / config.side);
        const AugmentedSystem system(config.side, marginal, marginal, w, 0.5, {});
        Vector l1(system.rows()), l2(system.rows());
        for (Eigen::Index r = 0; r < system.rows(); ++r) l1[r] = lambda_dist(rng);
        for (Eigen::Index r = 0; r < system.rows(); ++r) l2[r] = lambda_dist(rng);
        report = check_bounds_solutions(l1, l2, system, ctx);
        break;
      }
    }
    batch.reports[static_cast<std::size_t>(pair)] = report;
  }
  for (const auto& r : batch.reports) {
    if (!r.satisfied()) ++batch.violations;
    if (!r.naive_ok) ++batch.naive_violations;
  }
  return batch;
}

}  // namespace memtp
