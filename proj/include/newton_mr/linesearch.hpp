#pragma once

#include "newton_mr/core.hpp"

namespace nmr {

struct LinesearchConfig {
  double initial_step = 1.0;  // s
  double shrink = 0.5;        // rho
  double sufficient_decrease = 1e-4;  // sigma
  double min_step = 1e-18;
  double max_step = 1e10;
  // Relative band |f(x + l d) - f(x)| <= roundoff * |f(x)| in which function
  // differences are treated as noise and Armijo falls back to the slope
  // test g(x + l d)'d <= (2 sigma - 1) g'd. 0 disables the fallback.
  double roundoff = 1e-14;

  /// Throws Error if the constants are out of range.
  void validate() const;
};

/// Step length could not be found above min_step.
class StagnationError : public Error {
 public:
  StagnationError() : Error("stepsize stagnation") {}
};

struct LinesearchResult {
  double step = 0.0;
  double value = 0.0;  // f(x + step d)
  int evaluations = 0;
  bool forward = false;  // forward branch was taken (NPC only)
  bool capped = false;   // forward search was clipped at max_step
  bool approximate = false;  // accepted by the slope test inside the roundoff band
  Vector gradient;           // gradient at the accepted point, set only when approximate
};

/// Backtracking on f(x + l d) - f(x) <= sigma l g'd, l = s rho^j. When the
/// difference is below the resolution of f (see LinesearchConfig::roundoff)
/// the trial is judged by its slope instead, at the price of one gradient.
LinesearchResult armijo_backtrack(const CountedObjective& obj, const Vector& x, const Vector& d,
                                  double gtd, double fx, const LinesearchConfig& cfg);

/// Sufficient-decrease function for NPC directions:
///   f(x + l d) - f(x) - sigma l g'd - (sigma/2) l^2 d'Bd.
/// A step is acceptable when this is <= 0.
double npc_merit(double f_trial, double fx, double step, double gtd, double dbd, double sigma);

/// NPC linesearch: if the initial step is acceptable, grow it by 1/rho while
/// it stays acceptable and return the last acceptable one; otherwise
/// backtrack. `dbd` is d'Bd of the unregularized model and must be <= 0.
LinesearchResult npc_linesearch(const CountedObjective& obj, const Vector& x, const Vector& d,
                                double gtd, double dbd, double fx, const LinesearchConfig& cfg);

}  // namespace nmr
