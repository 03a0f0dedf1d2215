#include "newton_mr/linesearch.hpp"

#include <algorithm>
#include <cmath>

namespace nmr {

void LinesearchConfig::validate() const {
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error("linesearch: shrink factor must be in (0,1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw Error("linesearch: sufficient-decrease constant must be in (0,1)");
  }
  if (!(min_step > 0.0 && min_step < initial_step && initial_step <= max_step)) {
    throw Error("linesearch: need 0 < min_step < initial_step <= max_step");
  }
  if (!(roundoff >= 0.0 && roundoff < 1.0)) throw Error("linesearch: roundoff band must be in [0,1)");
}

double npc_merit(double f_trial, double fx, double step, double gtd, double dbd, double sigma) {
  return f_trial - fx - sigma * step * gtd - 0.5 * sigma * step * step * dbd;
}

LinesearchResult armijo_backtrack(const CountedObjective& obj, const Vector& x, const Vector& d,
                                  double gtd, double fx, const LinesearchConfig& cfg) {
  if (!(gtd < 0.0)) throw Error("armijo_backtrack: direction is not a descent direction");
  LinesearchResult res;
  double step = cfg.initial_step;
  for (;;) {
    const double f_trial = obj.value(x + step * d);
    ++res.evaluations;
    // NaN compares false and keeps backtracking.
    if (f_trial - fx <= cfg.sufficient_decrease * step * gtd) {
      res.step = step;
      res.value = f_trial;
      return res;
    }
    if (cfg.roundoff > 0.0 && std::abs(f_trial - fx) <= cfg.roundoff * std::abs(fx)) {
      Vector g_trial = obj.gradient(x + step * d);
      if (g_trial.dot(d) <= (2.0 * cfg.sufficient_decrease - 1.0) * gtd) {
        res.step = step;
        res.value = f_trial;
        res.approximate = true;
        res.gradient = std::move(g_trial);
        return res;
      }
    }
    step *= cfg.shrink;
    if (step < cfg.min_step) throw StagnationError();
  }
}

LinesearchResult npc_linesearch(const CountedObjective& obj, const Vector& x, const Vector& d,
                                double gtd, double dbd, double fx, const LinesearchConfig& cfg) {
  if (!(gtd < 0.0)) throw Error("npc_linesearch: direction is not a descent direction");
  if (!(dbd <= 0.0)) throw Error("npc_linesearch: direction has positive curvature");
  const double sigma = cfg.sufficient_decrease;
  LinesearchResult res;
  auto trial = [&](double step, double& f_trial) {
    f_trial = obj.value(x + step * d);
    ++res.evaluations;
    return npc_merit(f_trial, fx, step, gtd, dbd, sigma) <= 0.0;
  };

  double step = cfg.initial_step;
  double f_step = 0.0;
  if (!trial(step, f_step)) {
    for (;;) {
      step *= cfg.shrink;
      if (step < cfg.min_step) throw StagnationError();
      if (trial(step, f_step)) break;
    }
    res.step = step;
    res.value = f_step;
    return res;
  }

  res.forward = true;
  while (step < cfg.max_step) {
    const double candidate = std::min(step / cfg.shrink, cfg.max_step);
    double f_candidate = 0.0;
    if (!trial(candidate, f_candidate)) break;
    step = candidate;
    f_step = f_candidate;
  }
  res.capped = step >= cfg.max_step;
  res.step = step;
  res.value = f_step;
  return res;
}

}  // namespace nmr
