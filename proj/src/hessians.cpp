#include "newton_mr/hessians.hpp"

#include <cmath>
#include <utility>

namespace nmr {

SymmetricOperator exact_hvp_operator(const CountedObjective& obj, const Vector& x) {
  if (!obj.has_hvp()) throw Error("no Hessian oracle");
  return SymmetricOperator(obj.dim(), [&obj, x](const Vector& v) { return obj.hvp(x, v); });
}

SymmetricOperator regularized(SymmetricOperator base, double zeta) {
  if (!std::isfinite(zeta) || zeta < 0.0) throw Error("regularization must be finite and >= 0");
  const Index n = base.dim();
  if (zeta == 0.0) return base;
  return SymmetricOperator(n, [base = std::move(base), zeta](const Vector& v) -> Vector {
    return base(v) + zeta * v;
  });
}

LbfgsStore::LbfgsStore(Index dim, std::size_t memory)
    : dim_(dim), memory_(memory), s_(dim, static_cast<Index>(memory)),
      y_(dim, static_cast<Index>(memory)) {
  if (dim < 1) throw Error("L-BFGS dimension must be positive");
  if (memory < 1) throw Error("L-BFGS memory must be at least 1");
}

bool LbfgsStore::update(const Vector& s, const Vector& y) {
  if (s.size() != dim_ || y.size() != dim_) throw Error("L-BFGS pair has wrong dimension");
  const double ss = s.squaredNorm();
  if (!(ss > 0.0)) throw Error("L-BFGS step must be nonzero");
  const double ys = y.dot(s);
  if (!std::isfinite(ys) || !(std::abs(ys) >= kAcceptance * ss)) return false;

  const auto m = static_cast<Index>(memory_);
  if (count_ == memory_) {
    // Shift left, dropping the oldest column.
    s_.leftCols(m - 1) = s_.rightCols(m - 1).eval();
    y_.leftCols(m - 1) = y_.rightCols(m - 1).eval();
    --count_;
  }
  s_.col(static_cast<Index>(count_)) = s;
  y_.col(static_cast<Index>(count_)) = y;
  ++count_;
  gamma_ = y.squaredNorm() / ys;
  refresh();
  return true;
}

void LbfgsStore::refresh() {
  const auto k = static_cast<Index>(count_);
  const Matrix s = s_.leftCols(k);
  const Matrix y = y_.leftCols(k);
  const Matrix sy = s.transpose() * y;

  Matrix lower = Matrix::Zero(k, k);
  for (Index i = 1; i < k; ++i) lower.row(i).head(i) = sy.row(i).head(i);

  Matrix middle(2 * k, 2 * k);
  middle.topLeftCorner(k, k) = gamma_ * (s.transpose() * s);
  middle.topRightCorner(k, k) = lower;
  middle.bottomLeftCorner(k, k) = lower.transpose();
  middle.bottomRightCorner(k, k) = -Matrix(sy.diagonal().asDiagonal());

  w_.resize(dim_, 2 * k);
  w_.leftCols(k) = gamma_ * s;
  w_.rightCols(k) = y;

  middle_.compute(middle);
  degenerate_ = !middle_.isInvertible();
}

Vector LbfgsStore::apply(const Vector& v) const {
  if (v.size() != dim_) throw Error("L-BFGS apply: wrong dimension");
  if (count_ == 0) return gamma_ * v;
  if (degenerate_) throw DegenerateLbfgsError();
  const Vector coeff = middle_.solve(w_.transpose() * v);
  return gamma_ * v - w_ * coeff;
}

SymmetricOperator LbfgsStore::as_operator() const {
  return SymmetricOperator(dim_, [this](const Vector& v) { return apply(v); });
}

}  // namespace nmr
