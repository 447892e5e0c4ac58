#include "memtp/problem.hpp"
#include "memtp/verify.hpp"

#include <doctest.h>

#include <algorithm>

using namespace memtp;

TEST_SUITE("problem") {
  TEST_CASE("relabeling maps cells to 1..N^2 and back") {
    CHECK(lex_index(1, 1, 3) == 1);
    CHECK(lex_index(2, 3, 3) == 6);
    CHECK(lex_index(3, 3, 3) == 9);
    // n divisible by N lands in the last column of row n / N.
    CHECK(unlex_index(6, 3) == std::pair{2, 3});
    CHECK(unlex_index(9, 3) == std::pair{3, 3});
    CHECK(unlex_index(4, 3) == std::pair{2, 1});
    for (int side = 1; side <= 7; ++side)
      for (int n = 1; n <= side * side; ++n) {
        const auto [i, j] = unlex_index(n, side);
        CHECK(lex_index(i, j, side) == n);
      }
    CHECK_THROWS_AS(unlex_index(0, 3), std::out_of_range);
    CHECK_THROWS_AS(unlex_index(10, 3), std::out_of_range);
    CHECK_THROWS_AS(lex_index(4, 1, 3), std::out_of_range);
  }

  TEST_CASE("marginal matrix has the expected layout and rank") {
    const Matrix c = build_marginal_constraints(2);
    Matrix want(4, 4);
    want << 1, 1, 0, 0,
            0, 0, 1, 1,
            1, 0, 1, 0,
            0, 1, 0, 1;
    CHECK(c == want);
    for (int n = 2; n <= 6; ++n) CHECK(verify::elimination_rank(build_marginal_constraints(n)) == 2 * n - 1);
    CHECK(build_marginal_constraints(1).size() == 2);
    CHECK_THROWS_AS(build_marginal_constraints(0), std::invalid_argument);
    CHECK_THROWS_AS(build_marginal_constraints(kMaxDenseSide + 1), std::invalid_argument);
  }

  TEST_CASE("validation collects every violation") {
    TransportProblem ok = TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
    CHECK(validate_problem(ok).empty());

    TransportProblem heavy = TransportProblem::make(Vector::Constant(2, 0.6), Vector::Constant(2, 0.5));
    const auto v = validate_problem(heavy);
    REQUIRE_FALSE(v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) {
      return x.code == "normalization" && x.message.find("1.2") != std::string::npos;
    }));

    TransportProblem messy = TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
    messy.p[0] = -0.1;
    messy.bounds.lower[3] = 2.0;
    messy.cost_target = 0.3;
    const auto all = validate_problem(messy);
    CHECK(all.size() >= 3);
    const auto bound = std::find_if(all.begin(), all.end(), [](const Violation& x) { return x.code == "bounds_order"; });
    REQUIRE(bound != all.end());
    REQUIRE(bound->cell.has_value());
    CHECK(*bound->cell == std::pair{2, 2});
  }

  TEST_CASE("augmented system stacks marginals, cost and extra rows") {
    Matrix w(2, 2);
    w << 0, 1, 2, 3;
    TransportProblem problem = TransportProblem::make(Vector::Constant(2, 0.5), Vector::Constant(2, 0.5), w);
    problem.extra.push_back({Vector::Constant(4, 1.0), 1.0});
    const AugmentedSystem sys = augment_constraints(problem, 0.7);
    REQUIRE(sys.rows() == 6);
    CHECK(sys.cost_row_index() == 4);
    const Matrix a = sys.dense();
    CHECK(a.topRows(4) == build_marginal_constraints(2));
    CHECK(a.row(4).transpose() == flatten(w));
    CHECK(a.row(5).transpose() == Vector::Constant(4, 1.0));
    Vector y(6);
    y << 0.5, 0.5, 0.5, 0.5, 0.7, 1.0;
    CHECK(sys.data() == y);
    CHECK(sys.with_cost(0.2).data()[4] == 0.2);

    const AugmentedSystem plain = augment_constraints(problem, std::nullopt);
    CHECK_FALSE(plain.has_cost_row());
    CHECK(plain.rows() == 5);
  }

  TEST_CASE("initial cost is the cost of the product plan") {
    Matrix w(2, 2);
    w << 0, 1, 1, 0;
    const Vector half = Vector::Constant(2, 0.5);
    CHECK(initial_cost(half, half, w) == doctest::Approx(0.5).epsilon(1e-15));
    const Vector x = product_plan(half, half);
    CHECK(x.isApproxToConstant(0.25));
    CHECK(unflatten(flatten(w), 2) == w);
  }
}
