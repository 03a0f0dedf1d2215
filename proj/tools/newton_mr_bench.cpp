// Benchmark harness: run solver x problem manifests, build performance
// profiles from the resulting traces, and run the invariant suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "newton_mr/bench.hpp"
#include "newton_mr/checks.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"MINRES-based linesearch solver benchmark harness"};
  app.require_subcommand(1);

  std::string manifest_path, out_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run every cell of a manifest and write one trace per run");
  run->add_option("--manifest", manifest_path, "Manifest JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory for traces")->required();
  run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  std::string traces_dir, metric = "oracles", profile_out;
  auto* profile = app.add_subcommand("profile", "Performance profile CSV from a trace directory");
  profile->add_option("--traces", traces_dir, "Directory of .jsonl traces")->required()->check(CLI::ExistingDirectory);
  profile->add_option("--metric", metric, "Cost metric")->check(CLI::IsMember({"f", "oracles", "time"}));
  profile->add_option("--out", profile_out, "CSV path (stdout if omitted)");

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "Run the invariant suites");
  check->add_option("--seed", check_seed, "Seed for randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto manifest = nmr::bench::load_manifest(manifest_path);
      const auto traces = nmr::bench::run_suite(manifest, jobs);
      fs::create_directories(out_dir);
      for (const auto& t : traces) {
        const fs::path path = fs::path(out_dir) / nmr::bench::trace_filename(t);
        nmr::bench::emit_trace(t, path);
        std::printf("%-24s %-16s %-10s iters=%-5zu oracles=%-7llu |g|=%.3e\n", t.problem.c_str(),
                    t.config.c_str(), std::string(nmr::to_string(t.status)).c_str(), t.iterations(),
                    static_cast<unsigned long long>(t.oracles), t.gnorm_final);
      }
      return 0;
    }
    if (*profile) {
      const auto traces = nmr::bench::read_trace_dir(traces_dir);
      const auto table = nmr::bench::performance_profile(traces, nmr::bench::parse_metric(metric));
      const std::string csv = nmr::bench::profile_csv(table);
      if (profile_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(profile_out);
        if (!(out << csv)) throw nmr::Error("cannot write " + profile_out);
      }
      return 0;
    }
    if (*check) {
      bool ok = true;
      for (const auto& r : nmr::run_invariant_checks(check_seed)) {
        std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
