#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "newton_mr/driver.hpp"

namespace nmr::bench {

/// Parses a flat JSON object of SolverConfig fields on top of `base`.
/// The optional key "preset" ("newton_mr" | "lbfgs_mr") replaces `base`.
/// Unknown keys and nested values are rejected.
SolverConfig parse_config(const std::string& json_text, const SolverConfig& base = {});
SolverConfig load_config(const std::filesystem::path& path);
/// Flat JSON object with every field (round-trips through parse_config).
std::string config_to_json(const SolverConfig& cfg);

struct ManifestEntry {
  std::string problem;
  Index dim = 0;
  std::string config;
  std::uint64_t seed = 0;
  int repeats = 1;
};

struct Manifest {
  std::vector<ManifestEntry> runs;
  std::map<std::string, SolverConfig> configs;
};

/// {"configs": {name: {flat config} | "path.json"}, "runs": [{problem, dim,
/// config, seed, repeats}]}. Config paths are relative to `base_dir`.
/// Built-in config names "newton_mr" and "lbfgs_mr" need no definition.
/// Every problem and config name is resolved here, before anything runs.
Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
Manifest load_manifest(const std::filesystem::path& path);

/// Runs every cell; repeat i uses seed + i. Output order follows the
/// manifest regardless of `jobs`.
std::vector<RunTrace> run_suite(const Manifest& manifest, int jobs = 1);

/// Line-delimited JSON: one object per IterateRecord with keys k, f, gnorm,
/// flag, lambda, inner_iters, theta_k, zeta_k, oracles, time_ms, then one
/// summary object ({"summary": true, ...}). Reals use 17 significant digits.
std::string format_trace(const RunTrace& trace);
RunTrace parse_trace(const std::string& text);

std::string trace_filename(const RunTrace& trace);
/// Writes format_trace(trace) to `path`; throws Error naming the path on failure.
void emit_trace(const RunTrace& trace, const std::filesystem::path& path);
RunTrace read_trace(const std::filesystem::path& path);
std::vector<RunTrace> read_trace_dir(const std::filesystem::path& dir);

enum class Metric { final_f, oracles, time };
Metric parse_metric(const std::string& name);

/// Dolan-More performance ratios. ratio(s, p) = cost(s, p) / min_s cost(s, p),
/// +inf when s failed on p. Problems no solver solved keep +inf everywhere
/// but still count in the denominator.
struct ProfileTable {
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  std::vector<std::vector<double>> ratios;  // [solver][problem]

  /// Fraction of problems with ratio <= tau.
  double fraction(std::size_t solver, double tau) const;
  /// 1 and every finite ratio, ascending, without duplicates.
  std::vector<double> breakpoints() const;
};

/// Raw form: costs[s][p] must be positive where solved[s][p] is true.
ProfileTable performance_profile(const std::vector<std::string>& solvers,
                                 const std::vector<std::string>& problems,
                                 const std::vector<std::vector<double>>& costs,
                                 const std::vector<std::vector<bool>>& solved);

/// Groups traces by config (solver) and problem/dim/seed (problem instance).
/// A run counts as solved when it CONVERGED. For Metric::final_f the cost is
/// f - min_s f + 1, so the best solver scores exactly 1.
ProfileTable performance_profile(const std::vector<RunTrace>& traces, Metric metric);

/// CSV with header `solver,tau,fraction`, one row per solver and breakpoint.
std::string profile_csv(const ProfileTable& table);

}  // namespace nmr::bench
