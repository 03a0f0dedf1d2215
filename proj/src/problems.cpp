#include "newton_mr/problems.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "newton_mr/random.hpp"

namespace nmr {

std::function<Vector(std::uint64_t)> uniform_start(Index n) {
  return [n](std::uint64_t seed) {
    CounterRng rng(seed);
    return rng.uniform_vector(n);
  };
}

ProblemSpec toy_sine(Index n) {
  if (n < 1) throw Error("toy_sine: n must be positive");
  ProblemSpec p;
  p.name = "toy_sine";
  p.optimal_value = 0.0;
  p.start = uniform_start(2 * n);
  Objective& o = p.objective;
  o.dim = 2 * n;
  o.value = [n](const Vector& z) {
    const Vector e = z.tail(n) - z.head(n).array().sin().matrix();
    return 0.5 * e.squaredNorm();
  };
  o.gradient = [n](const Vector& z) {
    const Vector e = z.tail(n) - z.head(n).array().sin().matrix();
    Vector g(2 * n);
    g.head(n) = -(z.head(n).array().cos() * e.array()).matrix();
    g.tail(n) = e;
    return g;
  };
  // Per coordinate the Hessian is the 2x2 block
  //   [ sin(x) e + cos(x)^2   -cos(x) ]
  //   [ -cos(x)                1      ],  e = y - sin(x).
  o.hvp = [n](const Vector& z, const Vector& v) {
    const auto x = z.head(n).array();
    const auto s = x.sin();
    const auto c = x.cos();
    const auto e = z.tail(n).array() - s;
    const auto vx = v.head(n).array();
    const auto vy = v.tail(n).array();
    Vector hv(2 * n);
    hv.head(n) = ((s * e + c * c) * vx - c * vy).matrix();
    hv.tail(n) = (vy - c * vx).matrix();
    return hv;
  };
  return p;
}

Vector saddle_spectrum(Index n) {
  if (n < 2) throw Error("saddle_spectrum: n must be at least 2");
  Vector a = Vector::Ones(n);
  a[1] = -1.0;
  return a;
}

ProblemSpec quartic_saddle(Vector spectrum, double radius) {
  const Index n = spectrum.size();
  if (n < 1 || !(spectrum.minCoeff() < 0.0)) {
    throw Error("quartic_saddle: spectrum needs a negative entry");
  }
  ProblemSpec p;
  p.name = "quartic_saddle";
  // Minimizers sit on the most negative axis at |x|^2 = -min(spectrum).
  const double lo = spectrum.minCoeff();
  p.optimal_value = -0.25 * lo * lo;
  p.start = [n, radius](std::uint64_t seed) {
    CounterRng rng(seed);
    return Vector(rng.uniform_vector(n, -1.0, 1.0) * (radius / std::sqrt(double(n))));
  };
  Objective& o = p.objective;
  o.dim = n;
  o.value = [a = spectrum](const Vector& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * x.dot(a.cwiseProduct(x)) + 0.25 * r2 * r2;
  };
  o.gradient = [a = spectrum](const Vector& x) -> Vector {
    return a.cwiseProduct(x) + x.squaredNorm() * x;
  };
  o.hvp = [a = spectrum](const Vector& x, const Vector& v) -> Vector {
    return a.cwiseProduct(v) + x.squaredNorm() * v + (2.0 * x.dot(v)) * x;
  };
  return p;
}

ProblemSpec rosenbrock(Index n) {
  if (n < 2) throw Error("rosenbrock: n must be at least 2");
  ProblemSpec p;
  p.name = "rosenbrock";
  p.optimal_value = 0.0;
  p.start = uniform_start(n);
  Objective& o = p.objective;
  o.dim = n;
  o.value = [n](const Vector& x) {
    double f = 0.0;
    for (Index i = 0; i + 1 < n; ++i) {
      const double t = x[i + 1] - x[i] * x[i];
      const double u = 1.0 - x[i];
      f += 100.0 * t * t + u * u;
    }
    return f;
  };
  o.gradient = [n](const Vector& x) {
    Vector g = Vector::Zero(n);
    for (Index i = 0; i + 1 < n; ++i) {
      const double t = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * t;
    }
    return g;
  };
  o.hvp = [n](const Vector& x, const Vector& v) {
    Vector hv = Vector::Zero(n);
    for (Index i = 0; i + 1 < n; ++i) {
      const double t = x[i + 1] - x[i] * x[i];
      const double hii = -400.0 * (t - 2.0 * x[i] * x[i]) + 2.0;
      const double hij = -400.0 * x[i];
      hv[i] += hii * v[i] + hij * v[i + 1];
      hv[i + 1] += hij * v[i] + 200.0 * v[i + 1];
    }
    return hv;
  };
  return p;
}

ProblemSpec quadratic(Vector spectrum) {
  const Index n = spectrum.size();
  if (n < 1 || !(spectrum.minCoeff() > 0.0)) throw Error("quadratic: spectrum must be positive");
  ProblemSpec p;
  p.name = "quadratic";
  p.optimal_value = 0.0;
  p.start = uniform_start(n);
  Objective& o = p.objective;
  o.dim = n;
  o.value = [a = spectrum](const Vector& x) { return 0.5 * x.dot(a.cwiseProduct(x)); };
  o.gradient = [a = spectrum](const Vector& x) -> Vector { return a.cwiseProduct(x); };
  o.hvp = [a = spectrum](const Vector&, const Vector& v) -> Vector { return a.cwiseProduct(v); };
  return p;
}

std::vector<std::string> problem_names() {
  return {"toy_sine", "quartic_saddle", "rosenbrock", "quadratic"};
}

ProblemSpec make_problem(const std::string& name, Index dim) {
  if (name == "toy_sine") return toy_sine(dim);
  if (name == "quartic_saddle") return quartic_saddle(saddle_spectrum(dim));
  if (name == "rosenbrock") return rosenbrock(dim);
  if (name == "quadratic") {
    if (dim < 1) throw Error("quadratic: dimension must be positive");
    // Spectrum log-spaced on [1e-2, 1e2].
    Vector spectrum(dim);
    for (Index i = 0; i < dim; ++i) {
      const double t = dim == 1 ? 0.0 : double(i) / double(dim - 1);
      spectrum[i] = std::pow(10.0, -2.0 + 4.0 * t);
    }
    return quadratic(std::move(spectrum));
  }
  throw Error("unknown problem: " + name);
}

SelfTestResult self_test(const ProblemSpec& problem, int points, std::uint64_t seed, double tol) {
  CounterRng rng(seed);
  SelfTestResult res;
  const Index n = problem.dim();
  for (int i = 0; i < points; ++i) {
    const Vector x = rng.uniform_vector(n, -1.0, 1.0);
    const Vector v = rng.normal_vector(n).normalized();
    res.grad_error = std::max(res.grad_error, fd_grad_check(problem.objective, x, 1e-5));
    res.hvp_error = std::max(res.hvp_error, fd_hvp_check(problem.objective, x, v, 1e-5));
  }
  res.passed = res.grad_error <= tol && res.hvp_error <= tol;
  return res;
}

}  // namespace nmr
