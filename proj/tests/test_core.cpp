#include <doctest.h>

#include <cmath>

#include "newton_mr/core.hpp"
#include "newton_mr/problems.hpp"
#include "newton_mr/random.hpp"

using namespace nmr;

namespace {

Objective half_norm(Index n) {
  Objective o;
  o.dim = n;
  o.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  o.gradient = [](const Vector& x) { return x; };
  o.hvp = [](const Vector&, const Vector& v) { return v; };
  return o;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("fd_grad_check on a quadratic is exact up to rounding") {
  CHECK(fd_grad_check(half_norm(2), vec({1, 2}), 1e-5) <= 1e-8);
}

TEST_CASE("fd_grad_check on the toy sine function") {
  const ProblemSpec p = toy_sine(4);
  CounterRng rng(11);
  for (int i = 0; i < 5; ++i) {
    CHECK(fd_grad_check(p.objective, rng.uniform_vector(p.dim(), -2.0, 2.0), 1e-5) <= 1e-6);
  }
}

TEST_CASE("fd_grad_check on a constant") {
  Objective o;
  o.dim = 3;
  o.value = [](const Vector&) { return 7.0; };
  o.gradient = [](const Vector& x) { return Vector::Zero(x.size()).eval(); };
  CHECK(fd_grad_check(o, vec({1, -1, 3}), 1e-5) <= 1e-12);
}

TEST_CASE("fd_grad_check rejects a non-evaluable objective") {
  Objective o = half_norm(2);
  o.value = [](const Vector& x) { return x[0] > 0.5 ? std::nan("") : 0.0; };
  CHECK_THROWS_WITH_AS(fd_grad_check(o, vec({0.5, 0}), 1e-3), "objective not evaluable",
                       EvaluationError);
}

TEST_CASE("fd_hvp_check with a constant indefinite Hessian") {
  Objective o;
  o.dim = 2;
  o.value = [](const Vector& x) { return 0.5 * (x[0] * x[0] - x[1] * x[1]); };
  o.gradient = [](const Vector& x) { return vec({x[0], -x[1]}); };
  o.hvp = [](const Vector&, const Vector& v) { return vec({v[0], -v[1]}); };
  const Vector x = vec({0.3, -2.0});
  const Vector e2 = vec({0, 1});
  CHECK(o.hvp(x, e2).isApprox(-e2));
  CHECK(fd_hvp_check(o, x, e2, 1e-5) <= 1e-8);
}

TEST_CASE("fd_hvp_check on the toy sine function") {
  const ProblemSpec p = toy_sine(4);
  CounterRng rng(12);
  for (int i = 0; i < 5; ++i) {
    const Vector x = rng.uniform_vector(p.dim(), -2.0, 2.0);
    const Vector v = rng.normal_vector(p.dim());
    CHECK(fd_hvp_check(p.objective, x, v, 1e-5) <= 1e-6);
  }
}

TEST_CASE("Hessian-vector product with v = 0 is exactly zero") {
  const ProblemSpec p = toy_sine(3);
  const Vector hv = p.objective.hvp(Vector::Constant(6, 0.4), Vector::Zero(6));
  CHECK(hv.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fd_hvp_check(p.objective, Vector::Constant(6, 0.4), Vector::Zero(6), 1e-5) == 0.0);
}

TEST_CASE("fd_hvp_check without a Hessian oracle") {
  Objective o = half_norm(2);
  o.hvp = nullptr;
  CHECK_THROWS_WITH(fd_hvp_check(o, vec({1, 1}), vec({1, 0}), 1e-5), "no Hessian oracle");
}

TEST_CASE("oracle accounting charges 1 / 1 / 2 and is monotone") {
  const Objective o = half_norm(3);
  OracleCounter counter;
  const CountedObjective ev(o, counter);
  const Vector x = Vector::Ones(3);
  std::uint64_t last = counter.total();
  std::uint64_t expected = 0;
  const int kinds[] = {0, 1, 2, 2, 0, 1, 2};
  for (int kind : kinds) {
    if (kind == 0) {
      ev.value(x);
      expected += 1;
    } else if (kind == 1) {
      ev.gradient(x);
      expected += 1;
    } else {
      ev.hvp(x, x);
      expected += 2;
    }
    CHECK(counter.total() >= last);
    CHECK(counter.total() == expected);
    last = counter.total();
  }
  CHECK(ev.oracles() == expected);
}

TEST_CASE("oracle costs are configurable") {
  const Objective o = half_norm(2);
  OracleCounter counter;
  const CountedObjective ev(o, counter, OracleCosts{3, 5, 7});
  ev.value(Vector::Ones(2));
  ev.gradient(Vector::Ones(2));
  ev.hvp(Vector::Ones(2), Vector::Ones(2));
  CHECK(counter.total() == 15);
}

TEST_CASE("counted objective without Hessian oracle") {
  Objective o = half_norm(2);
  o.hvp = nullptr;
  OracleCounter counter;
  const CountedObjective ev(o, counter);
  CHECK_FALSE(ev.has_hvp());
  CHECK_THROWS_WITH(ev.hvp(Vector::Ones(2), Vector::Ones(2)), "no Hessian oracle");
  CHECK(counter.total() == 0);
}

TEST_CASE("symmetry_defect separates symmetric and non-symmetric maps") {
  CounterRng rng(5);
  Matrix g = Matrix::NullaryExpr(6, 6, [&] { return rng.normal(); });
  const Matrix sym = g + g.transpose();
  CHECK(symmetry_defect(SymmetricOperator::from_dense(sym), 20, 1) <= 1e-10);
  CHECK(symmetry_defect(SymmetricOperator::from_dense(g), 20, 1) > 1e-3);
}

TEST_CASE("operator dimension is checked on apply") {
  const SymmetricOperator op = SymmetricOperator::from_dense(Matrix::Identity(3, 3));
  CHECK(op.dim() == 3);
  CHECK_THROWS_AS(op.apply(Vector::Ones(2)), Error);
}

TEST_CASE("all_finite") {
  CHECK(all_finite(vec({1, 2})));
  CHECK_FALSE(all_finite(vec({1, std::nan("")})));
  CHECK_FALSE(all_finite(vec({INFINITY, 0})));
}

TEST_CASE("counter RNG streams are reproducible and in range") {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CounterRng u(1);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
  CounterRng z(2);
  double m2 = 0.0;
  for (int i = 0; i < 20000; ++i) m2 += std::pow(z.normal(), 2);
  CHECK(m2 / 20000 == doctest::Approx(1.0).epsilon(0.05));
}
