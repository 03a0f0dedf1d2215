#pragma once

#include <functional>
#include <string_view>

#include "newton_mr/core.hpp"

namespace nmr {

enum class MinresFlag { SOL, NPC, MAXITER };

std::string_view to_string(MinresFlag flag);

/// Thrown when the recurrence produces a NaN/Inf.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct MinresOutcome {
  /// SOL/MAXITER: the iterate x_t. NPC: |b| r_{t-1} / |r_{t-1}|.
  Vector direction;
  /// SOL/MAXITER: r_t = b - A x_t (recurred). NPC: r_{t-1}.
  Vector residual;
  MinresFlag flag = MinresFlag::MAXITER;
  int inner_iters = 0;
  /// direction' A direction, obtained from scalars already on hand.
  double curvature_value = 0.0;
  /// Residual norm estimate phi at exit.
  double residual_norm = 0.0;
};

/// Snapshot handed to an observer at every inner iteration, after the
/// non-positive-curvature test and (if it passed) the iterate update.
struct MinresStep {
  int t = 0;
  double alpha = 0.0;      // alpha_t = v_t' A v_t
  double beta_next = 0.0;  // beta_{t+1}
  double c_prev = 0.0;     // c_{t-1}
  double gamma1 = 0.0;     // gamma_t^(1)
  double phi_prev = 0.0;   // phi_{t-1} = |r_{t-1}|
  double phi = 0.0;        // phi_t (undefined when npc)
  bool npc = false;
  const Vector* lanczos = nullptr;        // v_t
  const Vector* residual_prev = nullptr;  // r_{t-1}
  const Vector* iterate = nullptr;        // x_t, null when npc
  const Vector* residual = nullptr;       // r_t, null when npc
};

using MinresObserver = std::function<void(const MinresStep&)>;

/// MINRES on A x = b that stops at the first non-positive-curvature
/// certificate.
///
/// At inner step t the Lanczos vector v_t is expanded and the previous
/// Givens rotation (c_{t-1}, s_{t-1}) is applied to the new column of the
/// tridiagonal. The product c_{t-1} * gamma_t^(1) equals
/// -r_{t-1}'A r_{t-1} / phi_{t-1}^2, so `c_{t-1} gamma_t^(1) >= 0` (exact
/// comparison) flags r_{t-1} as an NPC direction and the solve returns it
/// scaled to length |b|. Otherwise the new rotation and the iterate/residual
/// updates are formed and the solve exits with SOL once phi_t <= theta |b|.
///
/// `theta` is relative to |b|; residuals below machine precision relative to
/// |b| also count as converged, and a Lanczos coefficient beta_{t+1} at
/// roundoff level of |A| is treated as exact breakdown (the Krylov space
/// is invariant, so phi_t = 0).
///
/// Throws Error for b = 0 and BreakdownError on non-finite arithmetic.
MinresOutcome minres_npc(const SymmetricOperator& a, const Vector& b, double theta,
                         int max_inner, const MinresObserver& observer = {});

}  // namespace nmr
