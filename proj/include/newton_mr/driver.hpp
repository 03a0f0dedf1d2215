#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "newton_mr/core.hpp"
#include "newton_mr/linesearch.hpp"
#include "newton_mr/minres.hpp"

namespace nmr {

/// Rule for the MINRES relative tolerance theta_k.
enum class ToleranceRule {
  newton_mr,  // min{0.1, sqrt|g|}
  lbfgs_mr,   // min{0.1, log(k+1) sqrt(k |g|)}
  power,      // min{tolerance_cap, |g|^tolerance_exp}
};

/// Rule for the regularization zeta_k.
enum class RegularizerRule {
  power,         // min{regularizer_cap, z_k |g|^regularizer_exp}, z_k = (k log(k+1)^2)^exp
  theta_scaled,  // theta_scale * theta_k
};

struct ScheduleParams {
  double curvature_const = 0.5e-12;  // upper cap of the curvature threshold
  double curvature_exp = 1.0;        // alpha
  double tolerance_cap = 0.1;
  double tolerance_exp = 1.0;        // beta
  double regularizer_cap = 1e-12;
  double regularizer_exp = 1.0;
  double theta_scale = 1.0;          // used by RegularizerRule::theta_scaled
  double curvature_bound = 1e8;      // M-bar of the refined test
  ToleranceRule tolerance_rule = ToleranceRule::newton_mr;
  RegularizerRule regularizer_rule = RegularizerRule::power;

  void validate() const;
};

struct Schedule {
  double theta = 0.0;
  double zeta = 0.0;
  double a = 0.0;
};

/// Per-iteration scalars for outer iteration k >= 1 (one-based).
/// Logarithms are taken of k + 1 so that the k = 1 factors stay positive.
Schedule schedule_eval(int k, double gnorm, const ScheduleParams& sp);

/// min{curvature_const, a gnorm^alpha}.
double curvature_threshold(double gnorm, double a, const ScheduleParams& sp);

/// p'B̄p >= threshold |p|^2.
bool curvature_test_basic(double pbp, double pnorm2, double gnorm, double a,
                          const ScheduleParams& sp);

enum class DirectionFlag { SOL, NPC, GD };
std::string_view to_string(DirectionFlag flag);

/// SOL: p'B̄p >= threshold max{|p|^2, |g|^2}. NPC: |d'Bd| < M-bar |d|^2.
bool curvature_test_refined(double pbp, double pnorm2, double gnorm2, double dbd,
                            double dnorm2, DirectionFlag flag, double a,
                            const ScheduleParams& sp);

enum class HessianMode { exact, lbfgs };
enum class CurvatureTest { basic, refined };

struct SolverConfig {
  ScheduleParams schedule;
  LinesearchConfig linesearch;
  int max_inner = 1000;
  double grad_tol = 1e-10;
  std::uint64_t max_oracles = 100000;
  HessianMode hessian = HessianMode::exact;
  CurvatureTest curvature_test = CurvatureTest::basic;
  std::size_t lbfgs_memory = 10;
  OracleCosts costs;

  void validate() const;

  /// Exact Hessian, basic test, newton_mr tolerance.
  static SolverConfig newton_mr();
  /// L-BFGS operator, refined test, lbfgs_mr tolerance.
  static SolverConfig lbfgs_mr();
};

enum class RunStatus { CONVERGED, STAGNATED, BUDGET, DIVERGED };
std::string_view to_string(RunStatus status);

struct IterateRecord {
  int k = 0;
  double f = 0.0;      // f(x_k)
  double gnorm = 0.0;  // |g(x_k)|
  DirectionFlag flag = DirectionFlag::GD;
  double lambda = 0.0;
  int inner_iters = 0;
  double theta = 0.0;
  double zeta = 0.0;
  std::uint64_t oracles = 0;  // cumulative, after the step
  double time_ms = 0.0;       // cumulative wall clock
};

struct RunTrace {
  std::string problem;
  Index dim = 0;  // problem size parameter, for bookkeeping
  std::string config;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::DIVERGED;
  std::vector<IterateRecord> records;
  Vector x_final;
  double f_final = 0.0;
  double gnorm_final = 0.0;
  std::uint64_t oracles = 0;
  double time_ms = 0.0;

  std::size_t iterations() const { return records.size(); }
};

/// Everything known about one outer iteration, handed to an observer after
/// the step is accepted. Intended for instrumentation and tests.
struct IterationInfo {
  int k = 0;
  const Vector* x = nullptr;
  const Vector* gradient = nullptr;
  const Vector* direction = nullptr;
  DirectionFlag flag = DirectionFlag::GD;
  MinresFlag minres_flag = MinresFlag::MAXITER;
  bool minres_ran = false;
  Schedule schedule;
  /// d'B̄d from MINRES (SOL/NPC); d'Bd = this - zeta |d|^2.
  double regularized_curvature = 0.0;
  double curvature = 0.0;
  double lambda = 0.0;
  bool forward = false;
  bool capped = false;
  bool approximate = false;  // Armijo step accepted inside the roundoff band
  double f_before = 0.0;
  double f_after = 0.0;
};

using IterationObserver = std::function<void(const IterationInfo&)>;

/// MINRES-based linesearch method. Each outer iteration solves
/// (B + zeta I) d = -g with minres_npc, gates SOL steps through the
/// configured curvature test (falling back to -g), and picks the stepsize
/// with Armijo backtracking (SOL/GD) or the forward/backward NPC search.
RunTrace solve(const Objective& obj, const Vector& x0, const SolverConfig& cfg,
               const IterationObserver& observer = {});

}  // namespace nmr
