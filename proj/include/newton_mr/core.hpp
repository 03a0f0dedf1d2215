#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nmr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an objective returns NaN/Inf where a finite value is needed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

bool all_finite(const Vector& v);

/// Symmetric linear map v -> Av given only through its action.
class SymmetricOperator {
 public:
  using ApplyFn = std::function<Vector(const Vector&)>;

  SymmetricOperator(Index dim, ApplyFn apply);

  /// Wraps a dense symmetric matrix (no symmetry check is performed).
  static SymmetricOperator from_dense(Matrix a);

  Index dim() const { return dim_; }
  Vector apply(const Vector& v) const;
  Vector operator()(const Vector& v) const { return apply(v); }

 private:
  Index dim_;
  ApplyFn apply_;
};

/// Largest normalized symmetry defect |u'Av - v'Au| / (1 + |u||v||A|_est)
/// over `probes` random pairs.
double symmetry_defect(const SymmetricOperator& op, int probes, std::uint64_t seed);

/// Smooth objective given by callbacks. Evaluation must be pure in x.
struct Objective {
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HvpFn = std::function<Vector(const Vector&, const Vector&)>;

  Index dim = 0;
  ValueFn value;
  GradFn gradient;
  HvpFn hvp;  // may be empty

  bool has_hvp() const { return static_cast<bool>(hvp); }
};

/// Cost of each oracle kind, in units of one function evaluation.
struct OracleCosts {
  std::uint64_t value = 1;
  std::uint64_t gradient = 1;
  std::uint64_t hvp = 2;
};

/// Per-run tally of oracle calls. Not shared between runs.
class OracleCounter {
 public:
  void add(std::uint64_t n) { total_ += n; }
  std::uint64_t total() const { return total_; }

 private:
  std::uint64_t total_ = 0;
};

/// An objective bound to a counter: every call is charged.
class CountedObjective {
 public:
  CountedObjective(const Objective& obj, OracleCounter& counter, OracleCosts costs = {});

  Index dim() const { return obj_->dim; }
  bool has_hvp() const { return obj_->has_hvp(); }
  const Objective& objective() const { return *obj_; }
  std::uint64_t oracles() const { return counter_->total(); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Vector hvp(const Vector& x, const Vector& v) const;

 private:
  const Objective* obj_;
  OracleCounter* counter_;
  OracleCosts costs_;
};

/// Max over coordinates of |central difference - analytic| / (1 + |analytic|).
/// Throws EvaluationError if f is not finite at a probed point.
double fd_grad_check(const Objective& obj, const Vector& x, double h);

/// Max relative error between the Hessian-vector oracle and the central
/// difference (grad(x + hv) - grad(x - hv)) / 2h.
double fd_hvp_check(const Objective& obj, const Vector& x, const Vector& v, double h);

}  // namespace nmr
