#include "memtp/lp_oracle.hpp"
#include "memtp/verify.hpp"

#include <doctest.h>

using namespace memtp;

TEST_SUITE("lp_oracle") {
  TEST_CASE("canonical 2x2 puts the mass on the diagonal") {
    Matrix w(2, 2);
    w << 0, 1, 1, 0;
    const LpSolution lp = lp_oracle(TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), w));
    CHECK(lp.cost == doctest::Approx(0.0));
    CHECK(lp.x[0] == doctest::Approx(0.5));
    CHECK(lp.x[3] == doctest::Approx(0.5));
    CHECK(lp.x[1] == 0.0);
    CHECK(lp.x[2] == 0.0);
    CHECK(lp.basis.size() == 3);
    CHECK(lp.min_reduced_cost >= -1e-12);
  }

  TEST_CASE("zero cost returns a vertex") {
    auto rng = verify::make_rng(1, 1);
    TransportProblem p = verify::random_problem(rng, 5);
    p.cost = Matrix::Zero(5, 5);
    const LpSolution lp = lp_oracle(p);
    CHECK(lp.cost == 0.0);
    CHECK((lp.x.array() > 0.0).count() <= 9);
    CHECK(lp.marginal_residual <= 1e-12);
  }

  TEST_CASE("matches vertex enumeration on small instances") {
    auto rng = verify::make_rng(2, 2);
    for (int s = 0; s < 12; ++s) {
      const TransportProblem p = verify::random_problem(rng, 2 + s % 3);
      const LpSolution lp = lp_oracle(p);
      const auto vm = verify::vertex_enumeration_minimum(p);
      CHECK(lp.cost == doctest::Approx(vm.cost).epsilon(1e-12));
      CHECK(lp.min_reduced_cost >= -1e-12);
      CHECK(lp.marginal_residual <= 1e-12);
      CHECK((lp.x.array() >= 0.0).all());
    }
  }

  TEST_CASE("degenerate marginals still terminate") {
    Vector p(4), q(4);
    p << 0.25, 0.25, 0.25, 0.25;
    q << 0.5, 0.0, 0.25, 0.25;
    Matrix w(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w(i, j) = (i - j) * (i - j);
    const LpSolution lp = lp_oracle(TransportProblem::make(p, q, w));
    CHECK(lp.marginal_residual <= 1e-12);
    CHECK(lp.cost == doctest::Approx(verify::vertex_enumeration_minimum(TransportProblem::make(p, q, w)).cost));
  }

  TEST_CASE("unequal mass is rejected") {
    Matrix w = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(lp_oracle(TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.6), w)),
                    std::invalid_argument);
  }
}
