// Per-iteration checks of the direction-type properties (SOL / NPC / GD)
// and of monotone descent, usable as a solve() observer.
#pragma once

#include <cmath>
#include <string>

#include "newton_mr/driver.hpp"
#include "oracles.hpp"

namespace oracle {

struct DirectionAudit {
  const nmr::Objective* obj = nullptr;
  nmr::SolverConfig cfg;
  bool dense_norm = true;  // bound SOL descent with a dense ||B̄|| (exact Hessian only)

  int sol = 0, npc = 0, gd = 0, forward_npc = 0;
  int violations = 0;
  std::string first_violation;

  void fail(const nmr::IterationInfo& it, const std::string& what) {
    if (violations++ == 0) first_violation = "k=" + std::to_string(it.k) + ": " + what;
  }

  void operator()(const nmr::IterationInfo& it) {
    using nmr::DirectionFlag;
    const nmr::Vector& g = *it.gradient;
    const nmr::Vector& d = *it.direction;
    const nmr::ScheduleParams& sp = cfg.schedule;
    const double gnorm = g.norm();
    const double thr = nmr::curvature_threshold(gnorm, it.schedule.a, sp);
    switch (it.flag) {
      case DirectionFlag::SOL: {
        ++sol;
        if (dense_norm) {
          const Matrix h = dense_hessian(*obj, *it.x);
          const double bn =
              spectral_norm(h + it.schedule.zeta * Matrix::Identity(h.rows(), h.cols()));
          const double ck = 1.0 / (bn + bn * bn);
          if (!(-d.dot(g) > ck * thr * gnorm * gnorm)) fail(it, "SOL descent bound");
        }
        const double bound = std::max(gnorm / sp.curvature_const,
                                      std::pow(gnorm, 1.0 - sp.curvature_exp) / it.schedule.a);
        if (!(d.norm() <= bound + 1e-10)) fail(it, "SOL length bound");
        break;
      }
      case DirectionFlag::NPC:
        ++npc;
        if (it.forward && it.lambda > cfg.linesearch.initial_step) ++forward_npc;
        if (!(-d.dot(g) > it.schedule.theta * gnorm * gnorm)) fail(it, "NPC descent bound");
        if (!(std::abs(d.norm() - gnorm) <= 1e-10 * std::max(1.0, gnorm))) fail(it, "NPC length");
        if (!(it.curvature <= -it.schedule.zeta * d.squaredNorm() + 1e-8)) fail(it, "NPC curvature");
        break;
      case DirectionFlag::GD:
        ++gd;
        if (!(d == -g)) fail(it, "GD direction");
        break;
    }
    // Steps accepted inside the Armijo roundoff band may leave f unchanged.
    if (it.approximate) {
      if (!(it.f_after <= it.f_before + cfg.linesearch.roundoff * std::abs(it.f_before))) {
        fail(it, "descent (roundoff band)");
      }
    } else if (!(it.f_after < it.f_before)) {
      fail(it, "descent");
    }
  }
};

}  // namespace oracle
