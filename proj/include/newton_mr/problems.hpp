#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "newton_mr/core.hpp"

namespace nmr {

struct ProblemSpec {
  std::string name;
  Objective objective;
  std::optional<double> optimal_value;
  /// Starting point for a given seed.
  std::function<Vector(std::uint64_t seed)> start;

  Index dim() const { return objective.dim; }
};

/// f(x, y) = 1/2 |y - sin(x)|^2 with x, y in R^n; variables ordered [x; y].
ProblemSpec toy_sine(Index n);

/// f(x) = 1/2 x' diag(spectrum) x + 1/4 |x|^4. The origin is a strict saddle.
/// Starts are uniform in the box of half-width radius / sqrt(n) around 0.
ProblemSpec quartic_saddle(Vector spectrum, double radius = 1e-3);

/// diag(1, -1, 1, 1, ...) of length n (n >= 2).
Vector saddle_spectrum(Index n);

/// Chained Rosenbrock, sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2.
ProblemSpec rosenbrock(Index n);

/// f(x) = 1/2 sum spectrum_i x_i^2 (spectrum > 0).
ProblemSpec quadratic(Vector spectrum);

/// Uniform [0,1]^n starts.
std::function<Vector(std::uint64_t)> uniform_start(Index n);

/// Registry names accepted by make_problem.
std::vector<std::string> problem_names();

/// Looks a problem up by name. `dim` is the problem-specific size
/// parameter (n for toy_sine gives 2n variables). Throws Error on an
/// unknown name or invalid size.
ProblemSpec make_problem(const std::string& name, Index dim);

struct SelfTestResult {
  double grad_error = 0.0;
  double hvp_error = 0.0;
  bool passed = false;
};

/// Central-difference checks of gradient and Hessian-vector products at
/// `points` random points drawn uniformly from [-1, 1]^n.
SelfTestResult self_test(const ProblemSpec& problem, int points, std::uint64_t seed,
                         double tol = 1e-6);

}  // namespace nmr
