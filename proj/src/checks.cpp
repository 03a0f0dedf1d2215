#include "newton_mr/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/QR>

#include "newton_mr/driver.hpp"
#include "newton_mr/hessians.hpp"
#include "newton_mr/linesearch.hpp"
#include "newton_mr/minres.hpp"
#include "newton_mr/problems.hpp"
#include "newton_mr/random.hpp"

namespace nmr {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Matrix random_symmetric(CounterRng& rng, Index n, bool indefinite) {
  const Matrix g = Matrix::NullaryExpr(n, n, [&] { return rng.normal(); });
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector eig(n);
  for (Index i = 0; i < n; ++i) {
    // Spectrum magnitudes in [1, 10]: with larger condition numbers plain
    // Lanczos loses global orthogonality and r'b = |r|^2 drifts well above 1e-8.
    const double mag = std::pow(10.0, rng.uniform(0.0, 1.0));
    eig[i] = (indefinite && rng.uniform() < 0.5) ? -mag : mag;
  }
  if (indefinite && n > 1 && eig.minCoeff() > 0.0) eig[0] = -eig[0];
  return q * eig.asDiagonal() * q.transpose();
}

CheckResult check_problems(std::uint64_t seed) {
  CheckResult res{"problem derivative self-tests", true, ""};
  const std::vector<ProblemSpec> problems = {toy_sine(5), quartic_saddle(saddle_spectrum(6)),
                                             rosenbrock(6), make_problem("quadratic", 6)};
  for (const auto& p : problems) {
    const auto st = self_test(p, 10, seed);
    if (!st.passed) res.passed = false;
    res.detail += p.name + " grad " + sci(st.grad_error) + " hvp " + sci(st.hvp_error) + "; ";
  }
  return res;
}

CheckResult check_symmetry(std::uint64_t seed) {
  CheckResult res{"operator symmetry", true, ""};
  CounterRng rng(seed);
  double worst = 0.0;
  OracleCounter counter;
  for (const auto& name : problem_names()) {
    const ProblemSpec p = make_problem(name, 6);
    const CountedObjective ev(p.objective, counter);
    const Vector x = rng.uniform_vector(p.dim(), -1.0, 1.0);
    worst = std::max(worst, symmetry_defect(exact_hvp_operator(ev, x), 20, seed + 1));
    worst = std::max(worst, symmetry_defect(regularized(exact_hvp_operator(ev, x), 0.3), 20, seed + 2));
  }
  LbfgsStore store(8, 4);
  for (int i = 0; i < 6; ++i) store.update(rng.normal_vector(8), rng.normal_vector(8));
  if (!store.degenerate()) worst = std::max(worst, symmetry_defect(store.as_operator(), 20, seed + 3));
  res.passed = worst <= 1e-10;
  res.detail = "max defect " + sci(worst);
  return res;
}

CheckResult check_minres(std::uint64_t seed) {
  CheckResult res{"MINRES identities", true, ""};
  CounterRng rng(seed);
  double worst_res = 0.0, worst_phi = 0.0, worst_curv = 0.0, worst_npc = 0.0;
  double worst_unit = 0.0, worst_orth = 0.0;
  bool monotone = true;
  int npc = 0, sol = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.next_u64() % 19);
    const Matrix a = random_symmetric(rng, n, trial % 2 == 0);
    const Vector b = rng.normal_vector(n);
    const double bb = b.squaredNorm();
    const double anorm = a.norm();
    Vector v_prev = Vector::Zero(n);
    double phi_last = b.norm();
    auto observer = [&](const MinresStep& s) {
      const Vector& rp = *s.residual_prev;
      const double rar = rp.dot(a * rp);
      worst_curv = std::max(worst_curv, std::abs(rar + s.phi_prev * s.phi_prev * s.c_prev * s.gamma1) /
                                            (anorm * bb));
      worst_unit = std::max(worst_unit, std::abs(s.lanczos->norm() - 1.0));
      worst_orth = std::max(worst_orth, std::abs(s.lanczos->dot(v_prev)));
      v_prev = *s.lanczos;
      if (s.npc) return;
      const Vector& r = *s.residual;
      worst_res = std::max(worst_res, std::abs(r.dot(b) - r.squaredNorm()) / bb);
      worst_phi = std::max(worst_phi, std::abs(s.phi - (b - a * *s.iterate).norm()) / std::sqrt(bb));
      if (s.phi > phi_last) monotone = false;
      phi_last = s.phi;
    };
    const MinresOutcome out = minres_npc(SymmetricOperator::from_dense(a), b, 0.0, static_cast<int>(n), observer);
    if (out.flag == MinresFlag::NPC) {
      ++npc;
      worst_npc = std::max(worst_npc, out.direction.dot(a * out.direction) / bb);
    } else if (out.flag == MinresFlag::SOL) {
      ++sol;
    }
  }
  res.passed = worst_res <= 1e-8 && worst_phi <= 1e-8 && worst_curv <= 1e-8 &&
               worst_unit <= 1e-10 && worst_orth <= 1e-8 && worst_npc <= 1e-10 && monotone;
  res.detail = "r'b " + sci(worst_res) + ", phi " + sci(worst_phi) + ", r'Ar " + sci(worst_curv) +
               ", |v|-1 " + sci(worst_unit) + ", v'v_prev " + sci(worst_orth) + ", npc d'Ad " + sci(worst_npc) +
               (monotone ? "" : ", phi not monotone") + " (" + std::to_string(sol) + " SOL, " +
               std::to_string(npc) + " NPC)";
  return res;
}

CheckResult check_linesearch(std::uint64_t seed) {
  CheckResult res{"linesearch post-conditions", true, ""};
  CounterRng rng(seed);
  const ProblemSpec p = rosenbrock(8);
  OracleCounter counter;
  const CountedObjective ev(p.objective, counter);
  LinesearchConfig cfg;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const Vector x = rng.uniform_vector(p.dim(), -1.0, 1.0);
    const Vector g = p.objective.gradient(x);
    const double fx = p.objective.value(x);
    const Vector d = -g;
    const auto ls = armijo_backtrack(ev, x, d, g.dot(d), fx, cfg);
    if (!(ls.value - fx <= cfg.sufficient_decrease * ls.step * g.dot(d))) res.passed = false;
    ++checked;
  }
  // Concave direction on the quartic saddle: the NPC condition must hold.
  const ProblemSpec q = quartic_saddle(saddle_spectrum(4));
  const CountedObjective evq(q.objective, counter);
  for (int i = 0; i < 20; ++i) {
    Vector x = rng.uniform_vector(4, -0.05, 0.05);
    const Vector g = q.objective.gradient(x);
    Vector d = Vector::Zero(4);
    d[1] = g[1] > 0.0 ? -1.0 : 1.0;
    const double gtd = g.dot(d);
    const double dbd = d.dot(q.objective.hvp(x, d));
    if (!(gtd < 0.0) || !(dbd <= 0.0)) continue;
    const double fx = q.objective.value(x);
    const auto ls = npc_linesearch(evq, x, d, gtd, dbd, fx, cfg);
    if (npc_merit(ls.value, fx, ls.step, gtd, dbd, cfg.sufficient_decrease) > 0.0) res.passed = false;
    ++checked;
  }
  res.detail = std::to_string(checked) + " searches";
  return res;
}

CheckResult check_descent() {
  CheckResult res{"solver monotone descent", true, ""};
  struct Case {
    ProblemSpec problem;
    SolverConfig cfg;
  };
  std::vector<Case> cases = {{make_problem("quadratic", 20), SolverConfig::newton_mr()},
                             {quartic_saddle(saddle_spectrum(10)), SolverConfig::newton_mr()},
                             {rosenbrock(10), SolverConfig::newton_mr()},
                             {rosenbrock(10), SolverConfig::lbfgs_mr()},
                             {toy_sine(10), SolverConfig::newton_mr()}};
  for (auto& c : cases) {
    bool monotone = true;
    const RunTrace t = solve(c.problem.objective, c.problem.start(7), c.cfg, [&](const IterationInfo& it) {
      // Steps accepted inside the roundoff band may leave f unchanged.
      const double slack = it.approximate ? c.cfg.linesearch.roundoff * std::abs(it.f_before) : 0.0;
      if (it.approximate ? !(it.f_after <= it.f_before + slack) : !(it.f_after < it.f_before)) monotone = false;
    });
    if (!monotone || t.status != RunStatus::CONVERGED) res.passed = false;
    res.detail += c.problem.name + " " + std::string(to_string(t.status)) + " in " +
                  std::to_string(t.iterations()) + (monotone ? "; " : " (not monotone); ");
  }
  return res;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  return {check_problems(seed), check_symmetry(seed), check_minres(seed), check_linesearch(seed),
          check_descent()};
}

}  // namespace nmr
