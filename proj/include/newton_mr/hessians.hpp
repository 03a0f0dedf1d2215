#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/LU>

#include "newton_mr/core.hpp"

namespace nmr {

/// v -> hess f(x) v. Each application charges the counter of `obj`.
/// `obj` must outlive the returned operator.
SymmetricOperator exact_hvp_operator(const CountedObjective& obj, const Vector& x);

/// v -> base(v) + zeta v.
SymmetricOperator regularized(SymmetricOperator base, double zeta);

/// Thrown by LbfgsStore::apply when the compact-form middle block is singular.
class DegenerateLbfgsError : public Error {
 public:
  DegenerateLbfgsError() : Error("degenerate L-BFGS middle matrix") {}
};

/// Limited-memory BFGS matrix in compact form
///
///   B = g I - [g S  Y] [ g S'S   L ]^{-1} [g S  Y]'
///                      [  L'    -D ]
///
/// with L the strictly lower and D the diagonal part of S'Y and
/// g = y'y / y's from the newest pair. Pairs are accepted whenever
/// |y's| >= 1e-18 |s|^2, so B may be indefinite.
class LbfgsStore {
 public:
  static constexpr double kAcceptance = 1e-18;

  explicit LbfgsStore(Index dim, std::size_t memory = 10);

  /// Appends (s, y) if the cautious rule accepts it; evicts the oldest pair
  /// beyond `memory`. Returns whether the pair was stored.
  bool update(const Vector& s, const Vector& y);

  /// B v. Empty store returns v (g = 1).
  Vector apply(const Vector& v) const;

  /// The store as an operator. The store must outlive it and stay unchanged
  /// while it is in use.
  SymmetricOperator as_operator() const;

  Index dim() const { return dim_; }
  std::size_t memory() const { return memory_; }
  std::size_t size() const { return count_; }
  double gamma() const { return gamma_; }
  bool degenerate() const { return degenerate_; }

  /// Stored pairs, oldest first (n x size()).
  Matrix s_matrix() const { return s_.leftCols(static_cast<Index>(count_)); }
  Matrix y_matrix() const { return y_.leftCols(static_cast<Index>(count_)); }

 private:
  void refresh();

  Index dim_;
  std::size_t memory_;
  std::size_t count_ = 0;
  double gamma_ = 1.0;
  Matrix s_, y_;  // columns 0..count_-1, oldest first
  Matrix w_;      // [g S  Y]
  Eigen::FullPivLU<Matrix> middle_;
  bool degenerate_ = false;
};

}  // namespace nmr
