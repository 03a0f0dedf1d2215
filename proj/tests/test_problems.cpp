#include <doctest.h>

#include <cmath>

#include "newton_mr/problems.hpp"
#include "support/oracles.hpp"

using namespace nmr;

TEST_CASE("toy sine minimizers") {
  const ProblemSpec p = toy_sine(3);
  CHECK(p.dim() == 6);
  CHECK(p.objective.value(Vector::Zero(6)) == 0.0);
  CHECK(p.objective.gradient(Vector::Zero(6)).norm() == 0.0);
  Vector x(6);
  x << M_PI / 2, M_PI / 2, M_PI / 2, 1, 1, 1;
  CHECK(p.objective.value(x) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("toy sine gradient closed form") {
  const ProblemSpec p = toy_sine(2);
  Vector z(4);
  z << 0.3, -1.1, 0.7, 2.0;  // x = (0.3, -1.1), y = (0.7, 2.0)
  const Vector g = p.objective.gradient(z);
  for (int i = 0; i < 2; ++i) {
    const double res = z[2 + i] - std::sin(z[i]);
    CHECK(g[i] == doctest::Approx(-std::cos(z[i]) * res));
    CHECK(g[2 + i] == doctest::Approx(res));
  }
}

TEST_CASE("quartic saddle structure") {
  Vector spectrum(2);
  spectrum << 1, -1;
  const ProblemSpec p = quartic_saddle(spectrum);
  CHECK(p.objective.value(Vector::Zero(2)) == 0.0);
  CHECK(p.objective.gradient(Vector::Zero(2)).norm() == 0.0);
  CHECK(oracle::eigenvalues(oracle::dense_hessian(p.objective, Vector::Zero(2)))[0] ==
        doctest::Approx(-1.0));
  REQUIRE(p.optimal_value.has_value());
  CHECK(*p.optimal_value == -0.25);
  for (double sign : {1.0, -1.0}) {
    Vector x(2);
    x << 0.0, sign;
    CHECK(p.objective.value(x) == doctest::Approx(-0.25));
    CHECK(p.objective.gradient(x).norm() <= 1e-15);
    CHECK(oracle::eigenvalues(oracle::dense_hessian(p.objective, x))[0] > 0.0);
  }
  Vector pos(2);
  pos << 1, 1;
  CHECK_THROWS_AS(quartic_saddle(pos), Error);
}

TEST_CASE("quartic saddle starts lie near the origin") {
  const ProblemSpec p = quartic_saddle(saddle_spectrum(10));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Vector x0 = p.start(seed);
    CHECK(x0.norm() <= 1e-3);
    CHECK(x0.norm() > 0.0);
  }
  CHECK(p.start(3) == p.start(3));
  CHECK(p.start(3) != p.start(4));
}

TEST_CASE("saddle spectrum") {
  const Vector s = saddle_spectrum(5);
  Vector expected(5);
  expected << 1, -1, 1, 1, 1;
  CHECK(s == expected);
  CHECK_THROWS_AS(saddle_spectrum(1), Error);
}

TEST_CASE("rosenbrock minimizer") {
  const ProblemSpec p = rosenbrock(7);
  CHECK(p.objective.value(Vector::Ones(7)) == 0.0);
  CHECK(p.objective.gradient(Vector::Ones(7)).norm() == 0.0);
  CHECK_THROWS_AS(rosenbrock(1), Error);
}

TEST_CASE("quadratic with unit spectrum is half the squared norm") {
  const ProblemSpec p = quadratic(Vector::Ones(4));
  Vector x(4);
  x << 1, -2, 3, 0.5;
  CHECK(p.objective.value(x) == doctest::Approx(0.5 * x.squaredNorm()));
  CHECK(p.objective.gradient(x) == x);
  CHECK(p.objective.hvp(x, x) == x);
}

TEST_CASE("uniform starts lie in the unit box") {
  const auto start = uniform_start(50);
  const Vector x = start(9);
  CHECK(x.minCoeff() >= 0.0);
  CHECK(x.maxCoeff() < 1.0);
  CHECK(start(9) == x);
}

TEST_CASE("every registered problem passes its derivative self-test") {
  for (const auto& name : problem_names()) {
    CAPTURE(name);
    const ProblemSpec p = make_problem(name, 6);
    CHECK(p.name == name);
    const SelfTestResult st = self_test(p, 10, 0);
    CHECK(st.passed);
    CHECK(st.grad_error <= 1e-6);
    CHECK(st.hvp_error <= 1e-6);
  }
}

TEST_CASE("registry rejects unknown names and bad sizes") {
  CHECK_THROWS_AS(make_problem("nope", 3), Error);
  CHECK_THROWS_AS(make_problem("rosenbrock", 1), Error);
  CHECK_THROWS_AS(make_problem("toy_sine", 0), Error);
}
