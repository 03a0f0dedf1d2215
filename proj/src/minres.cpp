#include "newton_mr/minres.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace nmr {

std::string_view to_string(MinresFlag flag) {
  switch (flag) {
    case MinresFlag::SOL: return "SOL";
    case MinresFlag::NPC: return "NPC";
    case MinresFlag::MAXITER: return "MAXITER";
  }
  return "?";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// beta_{t+1} below this multiple of eps * |A|_est is an invariant subspace.
constexpr double kLanczosBreakdown = 10.0;

void require_finite(double value, const char* name, int t) {
  if (!std::isfinite(value)) {
    throw BreakdownError(std::string("numerical breakdown: non-finite ") + name +
                             " at inner iteration " + std::to_string(t),
                         t);
  }
}

}  // namespace

MinresOutcome minres_npc(const SymmetricOperator& a, const Vector& b, double theta,
                         int max_inner, const MinresObserver& observer) {
  if (b.size() != a.dim()) throw Error("right-hand side has wrong dimension");
  if (max_inner < 1) throw Error("max_inner must be at least 1");
  if (!(theta >= 0.0)) throw Error("tolerance must be non-negative");
  if (!b.allFinite()) throw Error("right-hand side is not finite");
  const double beta1 = b.norm();
  if (beta1 == 0.0) throw Error("zero right-hand side");

  const Index n = b.size();
  const double sol_threshold = std::max(theta, kEps) * beta1;

  Vector v_prev = Vector::Zero(n);
  Vector v = b / beta1;
  Vector x = Vector::Zero(n);
  Vector r_prev = b;
  Vector d_prev = Vector::Zero(n);
  Vector d_prev2 = Vector::Zero(n);
  Vector r(n), v_next(n), dir(n);

  double beta = 0.0;  // multiplies v_prev = 0 at t = 1
  double c_prev = -1.0, s_prev = 0.0;
  double delta1 = 0.0, eps_t = 0.0;
  double phi_prev = beta1;
  double anorm = 0.0;

  for (int t = 1; t <= max_inner; ++t) {
    Vector p = a(v);
    const double alpha = v.dot(p);
    p -= beta * v_prev;
    p -= alpha * v;
    double beta_next = p.norm();
    require_finite(alpha, "alpha", t);
    require_finite(beta_next, "beta", t);

    anorm = std::max(anorm, std::sqrt(alpha * alpha + beta * beta + beta_next * beta_next));
    if (beta_next <= kLanczosBreakdown * kEps * anorm) beta_next = 0.0;

    // Apply the previous rotation to the new tridiagonal column.
    const double delta2 = c_prev * delta1 + s_prev * alpha;
    const double eps_next = s_prev * beta_next;
    const double gamma1 = s_prev * delta1 - c_prev * alpha;
    const double delta1_next = -c_prev * beta_next;

    MinresStep step;
    step.t = t;
    step.alpha = alpha;
    step.beta_next = beta_next;
    step.c_prev = c_prev;
    step.gamma1 = gamma1;
    step.phi_prev = phi_prev;
    step.lanczos = &v;
    step.residual_prev = &r_prev;

    if (c_prev * gamma1 >= 0.0) {
      step.npc = true;
      if (observer) observer(step);
      MinresOutcome out;
      out.direction = (beta1 / r_prev.norm()) * r_prev;
      out.residual = r_prev;
      out.flag = MinresFlag::NPC;
      out.inner_iters = t;
      out.curvature_value = -beta1 * beta1 * c_prev * gamma1;
      out.residual_norm = phi_prev;
      return out;
    }

    const double gamma2 = std::hypot(gamma1, beta_next);
    assert(gamma2 > 0.0);
    const double c = gamma1 / gamma2;
    const double s = beta_next / gamma2;
    const double tau = c * phi_prev;
    const double phi = s * phi_prev;
    require_finite(tau, "tau", t);

    dir = (v - delta2 * d_prev - eps_t * d_prev2) / gamma2;
    x += tau * dir;
    if (beta_next > 0.0) {
      v_next = p / beta_next;
    } else {
      v_next.setZero();
    }
    r = (s * s) * r_prev - (phi * c) * v_next;
    if (!x.allFinite() || !r.allFinite()) {
      throw BreakdownError("numerical breakdown: non-finite iterate at inner iteration " +
                               std::to_string(t),
                           t);
    }

    step.phi = phi;
    step.iterate = &x;
    step.residual = &r;
    if (observer) observer(step);

    if (phi <= sol_threshold || t == max_inner) {
      MinresOutcome out;
      out.flag = phi <= sol_threshold ? MinresFlag::SOL : MinresFlag::MAXITER;
      out.inner_iters = t;
      out.curvature_value = x.dot(b - r);
      out.residual_norm = phi;
      out.direction = std::move(x);
      out.residual = std::move(r);
      return out;
    }

    std::swap(d_prev2, d_prev);
    std::swap(d_prev, dir);
    std::swap(v_prev, v);
    std::swap(v, v_next);
    std::swap(r_prev, r);
    beta = beta_next;
    c_prev = c;
    s_prev = s;
    delta1 = delta1_next;
    eps_t = eps_next;
    phi_prev = phi;
  }
  // Unreachable: the loop returns at t == max_inner.
  throw Error("minres: internal error");
}

}  // namespace nmr
