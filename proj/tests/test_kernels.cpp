#include "memtp/dual_solver.hpp"
#include "memtp/verify.hpp"

#include <doctest.h>

#include <vector>

using namespace memtp;

namespace {

double max_rel(const Matrix& a, const Matrix& b) {
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("serial and parallel kernels agree to 1e-12") {
    // Sides large enough to cross the parallel threshold.
    for (int side : {3, 17, 70, 130}) {
      auto rng = verify::make_rng(11, static_cast<std::uint32_t>(side));
      TransportProblem problem = verify::random_problem(rng, side);
      problem.extra.push_back({Vector::LinSpaced(problem.cells(), -1.0, 1.0), 0.0});
      const AugmentedSystem sys = augment_constraints(problem, 0.3);
      const BoxBounds box = BoxBounds::uniform(sys.cols(), -0.5, 1.5);
      const Vector lambda = Vector::LinSpaced(sys.rows(), -2.0, 3.0);
      const Vector x = Vector::LinSpaced(sys.cols(), 0.0, 1.0);
      CAPTURE(side);
      CHECK(max_rel(sys.apply(x, ExecPolicy::Parallel), sys.apply(x, ExecPolicy::Serial)) <= 1e-12);
      CHECK(max_rel(sys.apply_transpose(lambda, ExecPolicy::Parallel), sys.apply_transpose(lambda, ExecPolicy::Serial)) <=
            1e-12);
      CHECK(max_rel(sys.weighted_gram(x, ExecPolicy::Parallel), sys.weighted_gram(x, ExecPolicy::Serial)) <= 1e-12);
      const double lp = log_partition(lambda, sys, box, ExecPolicy::Parallel);
      const double ls = log_partition(lambda, sys, box, ExecPolicy::Serial);
      CHECK(std::abs(lp - ls) <= 1e-12 * std::max(1.0, std::abs(ls)));
      CHECK(max_rel(primal_from_dual(lambda, sys, box, ExecPolicy::Parallel),
                    primal_from_dual(lambda, sys, box, ExecPolicy::Serial)) <= 1e-12);
    }
  }

  TEST_CASE("parallel kernels are reproducible run to run") {
    auto rng = verify::make_rng(5, 0);
    const TransportProblem problem = verify::random_problem(rng, 90);
    const AugmentedSystem sys = augment_constraints(problem, 0.3);
    const BoxBounds box = BoxBounds::uniform(sys.cols());
    const Vector lambda = Vector::LinSpaced(sys.rows(), -1.0, 1.0);
    const double first = log_partition(lambda, sys, box);
    for (int k = 0; k < 5; ++k) CHECK(log_partition(lambda, sys, box) == first);
  }

  TEST_CASE("two-point helpers stay finite at large exponents") {
    for (double tau : {-800.0, -40.0, 0.0, 40.0, 800.0}) {
      CHECK(std::isfinite(two_point::log_partition(tau, 0.0, 1.0)));
      const double m = two_point::mean(tau, 0.0, 1.0);
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
      CHECK(two_point::variance(tau, 0.0, 1.0) >= 0.0);
    }
    CHECK(two_point::mean(0.0, -1.0, 3.0) == doctest::Approx(1.0));
    CHECK(two_point::log_partition(0.0, 0.0, 1.0) == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("shape mismatches are rejected") {
    const AugmentedSystem sys(2, Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), std::nullopt, std::nullopt, {});
    CHECK_THROWS(sys.apply(Vector::Zero(3)));
    CHECK_THROWS(sys.apply_transpose(Vector::Zero(3)));
  }
}
