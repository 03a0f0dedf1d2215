#include "newton_mr/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "newton_mr/random.hpp"

namespace nmr {

bool all_finite(const Vector& v) { return v.allFinite(); }

SymmetricOperator::SymmetricOperator(Index dim, ApplyFn apply)
    : dim_(dim), apply_(std::move(apply)) {
  if (dim_ < 1) throw Error("operator dimension must be positive");
}

SymmetricOperator SymmetricOperator::from_dense(Matrix a) {
  if (a.rows() != a.cols()) throw Error("dense operator must be square");
  const Index n = a.rows();
  return SymmetricOperator(n, [m = std::move(a)](const Vector& v) -> Vector { return m * v; });
}

Vector SymmetricOperator::apply(const Vector& v) const {
  if (v.size() != dim_) throw Error("operator applied to vector of wrong dimension");
  return apply_(v);
}

double symmetry_defect(const SymmetricOperator& op, int probes, std::uint64_t seed) {
  CounterRng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Vector u = rng.normal_vector(op.dim());
    const Vector v = rng.normal_vector(op.dim());
    const Vector au = op(u);
    const Vector av = op(v);
    const double norm_est = std::max(au.norm() / u.norm(), av.norm() / v.norm());
    const double defect = std::abs(u.dot(av) - v.dot(au));
    worst = std::max(worst, defect / (1.0 + u.norm() * v.norm() * norm_est));
  }
  return worst;
}

CountedObjective::CountedObjective(const Objective& obj, OracleCounter& counter,
                                   OracleCosts costs)
    : obj_(&obj), counter_(&counter), costs_(costs) {}

double CountedObjective::value(const Vector& x) const {
  counter_->add(costs_.value);
  return obj_->value(x);
}

Vector CountedObjective::gradient(const Vector& x) const {
  counter_->add(costs_.gradient);
  return obj_->gradient(x);
}

Vector CountedObjective::hvp(const Vector& x, const Vector& v) const {
  if (!obj_->has_hvp()) throw Error("no Hessian oracle");
  counter_->add(costs_.hvp);
  return obj_->hvp(x, v);
}

double fd_grad_check(const Objective& obj, const Vector& x, double h) {
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  if (!x.allFinite()) throw Error("finite-difference check at non-finite point");
  const Vector g = obj.gradient(x);
  double worst = 0.0;
  Vector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = obj.value(xp);
    xp[i] = x[i] - h;
    const double fm = obj.value(xp);
    xp[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw EvaluationError("objective not evaluable");
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
  }
  return worst;
}

double fd_hvp_check(const Objective& obj, const Vector& x, const Vector& v, double h) {
  if (!obj.has_hvp()) throw Error("no Hessian oracle");
  if (!(h > 0.0)) throw Error("finite-difference step must be positive");
  const Vector hv = obj.hvp(x, v);
  const Vector gp = obj.gradient(x + h * v);
  const Vector gm = obj.gradient(x - h * v);
  if (!gp.allFinite() || !gm.allFinite()) throw EvaluationError("objective not evaluable");
  const Vector fd = (gp - gm) / (2.0 * h);
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(fd[i] - hv[i]) / (1.0 + std::abs(hv[i])));
  }
  return worst;
}

}  // namespace nmr
