#include "newton_mr/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "newton_mr/hessians.hpp"

namespace nmr {

void ScheduleParams::validate() const {
  if (!(curvature_const > 0.0 && curvature_const <= 1.0)) {
    throw Error("schedule: curvature_const must be in (0,1]");
  }
  if (!(curvature_exp > 0.0 && curvature_exp <= 1.0)) {
    throw Error("schedule: curvature_exp must be in (0,1]");
  }
  if (!(regularizer_exp > 0.0 && regularizer_exp <= 1.0)) {
    throw Error("schedule: regularizer_exp must be in (0,1]");
  }
  if (!(tolerance_exp > 0.0)) throw Error("schedule: tolerance_exp must be positive");
  if (!(tolerance_cap > 0.0)) throw Error("schedule: tolerance_cap must be positive");
  if (!(regularizer_cap > 0.0)) throw Error("schedule: regularizer_cap must be positive");
  if (!(theta_scale >= 0.0)) throw Error("schedule: theta_scale must be non-negative");
  if (!(curvature_bound > 0.0)) throw Error("schedule: curvature_bound must be positive");
}

Schedule schedule_eval(int k, double gnorm, const ScheduleParams& sp) {
  if (k < 1) throw Error("schedule_eval: iteration index starts at 1");
  if (!(gnorm > 0.0)) throw Error("schedule_eval: gradient norm must be positive");
  const double kd = static_cast<double>(k);
  const double log_k = std::log(kd + 1.0);
  const double growth = kd * log_k * log_k;

  Schedule out;
  out.a = std::pow(growth, sp.curvature_exp) / 2.0;

  switch (sp.tolerance_rule) {
    case ToleranceRule::newton_mr:
      out.theta = std::min(sp.tolerance_cap, std::sqrt(gnorm));
      break;
    case ToleranceRule::lbfgs_mr:
      out.theta = std::min(sp.tolerance_cap, log_k * std::sqrt(kd * gnorm));
      break;
    case ToleranceRule::power:
      out.theta = std::min(sp.tolerance_cap, std::pow(gnorm, sp.tolerance_exp));
      break;
  }

  switch (sp.regularizer_rule) {
    case RegularizerRule::power: {
      const double z = std::pow(growth, sp.regularizer_exp);
      out.zeta = std::min(sp.regularizer_cap, z * std::pow(gnorm, sp.regularizer_exp));
      break;
    }
    case RegularizerRule::theta_scaled:
      out.zeta = sp.theta_scale * out.theta;
      break;
  }
  return out;
}

double curvature_threshold(double gnorm, double a, const ScheduleParams& sp) {
  return std::min(sp.curvature_const, a * std::pow(gnorm, sp.curvature_exp));
}

bool curvature_test_basic(double pbp, double pnorm2, double gnorm, double a,
                          const ScheduleParams& sp) {
  return pbp >= curvature_threshold(gnorm, a, sp) * pnorm2;
}

bool curvature_test_refined(double pbp, double pnorm2, double gnorm2, double dbd,
                            double dnorm2, DirectionFlag flag, double a,
                            const ScheduleParams& sp) {
  switch (flag) {
    case DirectionFlag::SOL:
      return pbp >= curvature_threshold(std::sqrt(gnorm2), a, sp) * std::max(pnorm2, gnorm2);
    case DirectionFlag::NPC:
      return std::abs(dbd) < sp.curvature_bound * dnorm2;
    case DirectionFlag::GD:
      return true;
  }
  return true;
}

std::string_view to_string(DirectionFlag flag) {
  switch (flag) {
    case DirectionFlag::SOL: return "SOL";
    case DirectionFlag::NPC: return "NPC";
    case DirectionFlag::GD: return "GD";
  }
  return "?";
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::CONVERGED: return "CONVERGED";
    case RunStatus::STAGNATED: return "STAGNATED";
    case RunStatus::BUDGET: return "BUDGET";
    case RunStatus::DIVERGED: return "DIVERGED";
  }
  return "?";
}

void SolverConfig::validate() const {
  schedule.validate();
  linesearch.validate();
  if (max_inner < 1) throw Error("config: max_inner must be at least 1");
  if (!(grad_tol > 0.0)) throw Error("config: grad_tol must be positive");
  if (lbfgs_memory < 1) throw Error("config: lbfgs_memory must be at least 1");
}

SolverConfig SolverConfig::newton_mr() { return SolverConfig{}; }

SolverConfig SolverConfig::lbfgs_mr() {
  SolverConfig cfg;
  cfg.hessian = HessianMode::lbfgs;
  cfg.curvature_test = CurvatureTest::refined;
  cfg.schedule.tolerance_rule = ToleranceRule::lbfgs_mr;
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

RunTrace solve(const Objective& obj, const Vector& x0, const SolverConfig& cfg,
               const IterationObserver& observer) {
  cfg.validate();
  if (x0.size() != obj.dim) throw Error("solve: starting point has wrong dimension");
  if (!x0.allFinite()) throw Error("solve: starting point is not finite");
  if (cfg.hessian == HessianMode::exact && !obj.has_hvp()) throw Error("no Hessian oracle");

  const auto start = Clock::now();
  OracleCounter counter;
  const CountedObjective ev(obj, counter, cfg.costs);
  const ScheduleParams& sp = cfg.schedule;

  RunTrace trace;
  Vector x = x0;
  double f = ev.value(x);
  Vector g = ev.gradient(x);
  if (!std::isfinite(f)) throw Error("solve: f(x0) is not finite");

  std::optional<LbfgsStore> store;
  if (cfg.hessian == HessianMode::lbfgs) store.emplace(obj.dim, cfg.lbfgs_memory);

  trace.status = RunStatus::DIVERGED;
  if (g.allFinite()) {
    for (int k = 0;; ++k) {
      const double gnorm = g.norm();
      if (gnorm <= cfg.grad_tol) {
        trace.status = RunStatus::CONVERGED;
        break;
      }
      if (counter.total() >= cfg.max_oracles) {
        trace.status = RunStatus::BUDGET;
        break;
      }

      IterationInfo info;
      info.k = k;
      info.schedule = schedule_eval(k + 1, gnorm, sp);
      const Schedule& sched = info.schedule;

      Vector d;
      DirectionFlag flag = DirectionFlag::GD;
      int inner = 0;
      try {
        SymmetricOperator base =
            store ? store->as_operator() : exact_hvp_operator(ev, x);
        const SymmetricOperator bbar = regularized(std::move(base), sched.zeta);
        MinresOutcome out = minres_npc(bbar, -g, sched.theta, cfg.max_inner);
        info.minres_ran = true;
        info.minres_flag = out.flag;
        inner = out.inner_iters;
        const double dnorm2 = out.direction.squaredNorm();
        info.regularized_curvature = out.curvature_value;
        info.curvature = out.curvature_value - sched.zeta * dnorm2;

        bool pass = false;
        if (out.flag == MinresFlag::NPC) {
          flag = DirectionFlag::NPC;
          pass = cfg.curvature_test == CurvatureTest::basic ||
                 curvature_test_refined(0.0, 0.0, gnorm * gnorm, info.curvature, dnorm2, flag,
                                        sched.a, sp);
        } else {
          // SOL, or MAXITER treated as a SOL candidate.
          flag = DirectionFlag::SOL;
          pass = cfg.curvature_test == CurvatureTest::basic
                     ? curvature_test_basic(out.curvature_value, dnorm2, gnorm, sched.a, sp)
                     : curvature_test_refined(out.curvature_value, dnorm2, gnorm * gnorm, 0.0,
                                              0.0, flag, sched.a, sp);
        }
        if (pass && g.dot(out.direction) < 0.0) {
          d = std::move(out.direction);
        } else {
          flag = DirectionFlag::GD;
        }
      } catch (const DegenerateLbfgsError&) {
        flag = DirectionFlag::GD;
      } catch (const BreakdownError&) {
        flag = DirectionFlag::GD;
      }
      if (flag == DirectionFlag::GD) d = -g;

      const double gtd = g.dot(d);
      LinesearchResult ls;
      try {
        ls = flag == DirectionFlag::NPC
                 ? npc_linesearch(ev, x, d, gtd, info.curvature, f, cfg.linesearch)
                 : armijo_backtrack(ev, x, d, gtd, f, cfg.linesearch);
      } catch (const StagnationError&) {
        trace.status = RunStatus::STAGNATED;
        break;
      }

      Vector step = ls.step * d;
      Vector x_new = x + step;
      Vector g_new = ls.approximate ? std::move(ls.gradient) : ev.gradient(x_new);
      if (!std::isfinite(ls.value) || !g_new.allFinite()) {
        trace.status = RunStatus::DIVERGED;
        break;
      }
      if (store && step.squaredNorm() > 0.0) store->update(step, g_new - g);

      IterateRecord rec;
      rec.k = k;
      rec.f = f;
      rec.gnorm = gnorm;
      rec.flag = flag;
      rec.lambda = ls.step;
      rec.inner_iters = inner;
      rec.theta = sched.theta;
      rec.zeta = sched.zeta;
      rec.oracles = counter.total();
      rec.time_ms = elapsed_ms(start);
      trace.records.push_back(rec);

      if (observer) {
        info.x = &x;
        info.gradient = &g;
        info.direction = &d;
        info.flag = flag;
        info.lambda = ls.step;
        info.forward = ls.forward;
        info.capped = ls.capped;
        info.approximate = ls.approximate;
        info.f_before = f;
        info.f_after = ls.value;
        observer(info);
      }

      x = std::move(x_new);
      g = std::move(g_new);
      f = ls.value;
    }
  }

  trace.x_final = x;
  trace.f_final = f;
  trace.gnorm_final = g.norm();
  trace.oracles = counter.total();
  trace.time_ms = elapsed_ms(start);
  return trace;
}

}  // namespace nmr
