#include "newton_mr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "newton_mr/problems.hpp"

namespace nmr::bench {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string(what) + ": " + e.what());
  }
}

template <typename E>
E parse_enum(const json& v, const std::string& key,
             std::initializer_list<std::pair<const char*, E>> options) {
  if (!v.is_string()) throw Error("config: " + key + " must be a string");
  const auto s = v.get<std::string>();
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  throw Error("config: bad value '" + s + "' for " + key);
}

double get_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw Error("config: " + key + " must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Error("config: " + key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

SolverConfig preset(const std::string& name) {
  if (name == "newton_mr") return SolverConfig::newton_mr();
  if (name == "lbfgs_mr") return SolverConfig::lbfgs_mr();
  throw Error("unknown config preset: " + name);
}

SolverConfig config_from_json(const json& obj, SolverConfig cfg) {
  if (!obj.is_object()) throw Error("config must be a JSON object");
  if (auto it = obj.find("preset"); it != obj.end()) {
    if (!it->is_string()) throw Error("config: preset must be a string");
    cfg = preset(it->get<std::string>());
  }
  ScheduleParams& sp = cfg.schedule;
  LinesearchConfig& ls = cfg.linesearch;
  for (const auto& [key, v] : obj.items()) {
    if (v.is_structured()) throw Error("config: value of " + key + " must not be nested");
    if (key == "preset") continue;
    if (key == "hessian") {
      cfg.hessian = parse_enum<HessianMode>(v, key, {{"exact", HessianMode::exact},
                                                     {"lbfgs", HessianMode::lbfgs}});
    } else if (key == "curvature_test") {
      cfg.curvature_test = parse_enum<CurvatureTest>(
          v, key, {{"basic", CurvatureTest::basic}, {"refined", CurvatureTest::refined}});
    } else if (key == "tolerance_rule") {
      sp.tolerance_rule = parse_enum<ToleranceRule>(v, key,
                                                    {{"newton_mr", ToleranceRule::newton_mr},
                                                     {"lbfgs_mr", ToleranceRule::lbfgs_mr},
                                                     {"power", ToleranceRule::power}});
    } else if (key == "regularizer_rule") {
      sp.regularizer_rule = parse_enum<RegularizerRule>(
          v, key, {{"power", RegularizerRule::power},
                   {"theta_scaled", RegularizerRule::theta_scaled}});
    } else if (key == "max_inner") {
      cfg.max_inner = static_cast<int>(get_count(v, key));
    } else if (key == "max_oracles") {
      cfg.max_oracles = get_count(v, key);
    } else if (key == "lbfgs_memory") {
      cfg.lbfgs_memory = get_count(v, key);
    } else if (key == "cost_value") {
      cfg.costs.value = get_count(v, key);
    } else if (key == "cost_gradient") {
      cfg.costs.gradient = get_count(v, key);
    } else if (key == "cost_hvp") {
      cfg.costs.hvp = get_count(v, key);
    } else if (key == "grad_tol") {
      cfg.grad_tol = get_double(v, key);
    } else if (key == "curvature_const") {
      sp.curvature_const = get_double(v, key);
    } else if (key == "curvature_exp") {
      sp.curvature_exp = get_double(v, key);
    } else if (key == "tolerance_cap") {
      sp.tolerance_cap = get_double(v, key);
    } else if (key == "tolerance_exp") {
      sp.tolerance_exp = get_double(v, key);
    } else if (key == "regularizer_cap") {
      sp.regularizer_cap = get_double(v, key);
    } else if (key == "regularizer_exp") {
      sp.regularizer_exp = get_double(v, key);
    } else if (key == "theta_scale") {
      sp.theta_scale = get_double(v, key);
    } else if (key == "curvature_bound") {
      sp.curvature_bound = get_double(v, key);
    } else if (key == "ls_initial_step") {
      ls.initial_step = get_double(v, key);
    } else if (key == "ls_shrink") {
      ls.shrink = get_double(v, key);
    } else if (key == "ls_sufficient_decrease") {
      ls.sufficient_decrease = get_double(v, key);
    } else if (key == "ls_min_step") {
      ls.min_step = get_double(v, key);
    } else if (key == "ls_max_step") {
      ls.max_step = get_double(v, key);
    } else if (key == "ls_roundoff") {
      ls.roundoff = get_double(v, key);
    } else {
      throw Error("config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

std::string fmt_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double read_real(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

template <typename E>
E enum_from_name(const std::string& s, std::initializer_list<E> values) {
  for (E e : values) {
    if (to_string(e) == s) return e;
  }
  throw Error("trace: bad enum value " + s);
}

std::string problem_key(const RunTrace& t) {
  return t.problem + "/" + std::to_string(t.dim) + "/" + std::to_string(t.seed);
}

}  // namespace

SolverConfig parse_config(const std::string& json_text, const SolverConfig& base) {
  return config_from_json(parse_json(json_text, "config"), base);
}

SolverConfig load_config(const fs::path& path) {
  try {
    return parse_config(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const SolverConfig& cfg) {
  const ScheduleParams& sp = cfg.schedule;
  const LinesearchConfig& ls = cfg.linesearch;
  json j;
  j["hessian"] = cfg.hessian == HessianMode::exact ? "exact" : "lbfgs";
  j["curvature_test"] = cfg.curvature_test == CurvatureTest::basic ? "basic" : "refined";
  j["tolerance_rule"] = sp.tolerance_rule == ToleranceRule::newton_mr  ? "newton_mr"
                        : sp.tolerance_rule == ToleranceRule::lbfgs_mr ? "lbfgs_mr"
                                                                       : "power";
  j["regularizer_rule"] = sp.regularizer_rule == RegularizerRule::power ? "power" : "theta_scaled";
  j["max_inner"] = cfg.max_inner;
  j["max_oracles"] = cfg.max_oracles;
  j["lbfgs_memory"] = cfg.lbfgs_memory;
  j["cost_value"] = cfg.costs.value;
  j["cost_gradient"] = cfg.costs.gradient;
  j["cost_hvp"] = cfg.costs.hvp;
  j["grad_tol"] = cfg.grad_tol;
  j["curvature_const"] = sp.curvature_const;
  j["curvature_exp"] = sp.curvature_exp;
  j["tolerance_cap"] = sp.tolerance_cap;
  j["tolerance_exp"] = sp.tolerance_exp;
  j["regularizer_cap"] = sp.regularizer_cap;
  j["regularizer_exp"] = sp.regularizer_exp;
  j["theta_scale"] = sp.theta_scale;
  j["curvature_bound"] = sp.curvature_bound;
  j["ls_initial_step"] = ls.initial_step;
  j["ls_shrink"] = ls.shrink;
  j["ls_sufficient_decrease"] = ls.sufficient_decrease;
  j["ls_min_step"] = ls.min_step;
  j["ls_max_step"] = ls.max_step;
  j["ls_roundoff"] = ls.roundoff;
  return j.dump(2);
}

Manifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  const json root = parse_json(json_text, "manifest");
  if (!root.is_object()) throw Error("manifest must be a JSON object");
  Manifest m;
  m.configs["newton_mr"] = SolverConfig::newton_mr();
  m.configs["lbfgs_mr"] = SolverConfig::lbfgs_mr();

  if (auto it = root.find("configs"); it != root.end()) {
    if (!it->is_object()) throw Error("manifest: configs must be an object");
    for (const auto& [name, value] : it->items()) {
      if (value.is_string()) {
        m.configs[name] = load_config(base_dir / value.get<std::string>());
      } else {
        try {
          m.configs[name] = config_from_json(value, SolverConfig{});
        } catch (const Error& e) {
          throw Error("manifest config " + name + ": " + e.what());
        }
      }
    }
  }

  const auto it = root.find("runs");
  if (it == root.end() || !it->is_array()) throw Error("manifest: runs must be an array");
  const auto known = problem_names();
  for (const auto& r : *it) {
    if (!r.is_object()) throw Error("manifest: each run must be an object");
    ManifestEntry e;
    try {
      e.problem = r.at("problem").get<std::string>();
      e.dim = r.at("dim").get<Index>();
      e.config = r.at("config").get<std::string>();
      e.seed = r.value("seed", std::uint64_t{0});
      e.repeats = r.value("repeats", 1);
    } catch (const json::exception& ex) {
      throw Error(std::string("manifest: malformed run: ") + ex.what());
    }
    if (std::find(known.begin(), known.end(), e.problem) == known.end()) {
      throw Error("manifest: unknown problem " + e.problem);
    }
    if (!m.configs.count(e.config)) throw Error("manifest: unknown config " + e.config);
    if (e.repeats < 1) throw Error("manifest: repeats must be at least 1");
    make_problem(e.problem, e.dim);  // validates the size
    m.runs.push_back(e);
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::string text = read_file(path);
  try {
    return parse_manifest(text, path.parent_path());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<RunTrace> run_suite(const Manifest& manifest, int jobs) {
  struct Cell {
    const ManifestEntry* entry;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& e : manifest.runs) {
    if (!manifest.configs.count(e.config)) throw Error("unknown config " + e.config);
    make_problem(e.problem, e.dim);
    for (int i = 0; i < e.repeats; ++i) cells.push_back({&e, e.seed + static_cast<std::uint64_t>(i)});
  }

  std::vector<RunTrace> out(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const ManifestEntry& e = *cells[i].entry;
        const ProblemSpec problem = make_problem(e.problem, e.dim);
        RunTrace t = solve(problem.objective, problem.start(cells[i].seed),
                           manifest.configs.at(e.config));
        t.problem = e.problem;
        t.dim = e.dim;
        t.config = e.config;
        t.seed = cells[i].seed;
        out[i] = std::move(t);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

std::string format_trace(const RunTrace& trace) {
  std::string s;
  for (const auto& r : trace.records) {
    s += "{\"k\":" + std::to_string(r.k);
    s += ",\"f\":" + fmt_real(r.f);
    s += ",\"gnorm\":" + fmt_real(r.gnorm);
    s += ",\"flag\":\"" + std::string(to_string(r.flag)) + "\"";
    s += ",\"lambda\":" + fmt_real(r.lambda);
    s += ",\"inner_iters\":" + std::to_string(r.inner_iters);
    s += ",\"theta_k\":" + fmt_real(r.theta);
    s += ",\"zeta_k\":" + fmt_real(r.zeta);
    s += ",\"oracles\":" + std::to_string(r.oracles);
    s += ",\"time_ms\":" + fmt_real(r.time_ms);
    s += "}\n";
  }
  s += "{\"summary\":true";
  s += ",\"problem\":" + json(trace.problem).dump();
  s += ",\"dim\":" + std::to_string(trace.dim);
  s += ",\"config\":" + json(trace.config).dump();
  s += ",\"seed\":" + std::to_string(trace.seed);
  s += ",\"status\":\"" + std::string(to_string(trace.status)) + "\"";
  s += ",\"iters\":" + std::to_string(trace.records.size());
  s += ",\"oracles\":" + std::to_string(trace.oracles);
  s += ",\"final_f\":" + fmt_real(trace.f_final);
  s += ",\"final_gnorm\":" + fmt_real(trace.gnorm_final);
  s += ",\"time_ms\":" + fmt_real(trace.time_ms);
  s += "}\n";
  return s;
}

RunTrace parse_trace(const std::string& text) {
  RunTrace t;
  std::istringstream in(text);
  std::string line;
  bool have_summary = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_summary) throw Error("trace: data after summary line");
    const json j = parse_json(line, ("trace line " + std::to_string(line_no)).c_str());
    try {
      if (j.value("summary", false)) {
        t.problem = j.at("problem").get<std::string>();
        t.dim = j.at("dim").get<Index>();
        t.config = j.at("config").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.status = enum_from_name<RunStatus>(
            j.at("status").get<std::string>(),
            {RunStatus::CONVERGED, RunStatus::STAGNATED, RunStatus::BUDGET, RunStatus::DIVERGED});
        t.oracles = j.at("oracles").get<std::uint64_t>();
        t.f_final = read_real(j.at("final_f"));
        t.gnorm_final = read_real(j.at("final_gnorm"));
        t.time_ms = read_real(j.at("time_ms"));
        have_summary = true;
        continue;
      }
      IterateRecord r;
      r.k = j.at("k").get<int>();
      r.f = read_real(j.at("f"));
      r.gnorm = read_real(j.at("gnorm"));
      r.flag = enum_from_name<DirectionFlag>(
          j.at("flag").get<std::string>(),
          {DirectionFlag::SOL, DirectionFlag::NPC, DirectionFlag::GD});
      r.lambda = read_real(j.at("lambda"));
      r.inner_iters = j.at("inner_iters").get<int>();
      r.theta = read_real(j.at("theta_k"));
      r.zeta = read_real(j.at("zeta_k"));
      r.oracles = j.at("oracles").get<std::uint64_t>();
      r.time_ms = read_real(j.at("time_ms"));
      t.records.push_back(r);
    } catch (const json::exception& e) {
      throw Error("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_summary) throw Error("trace: missing summary line");
  return t;
}

std::string trace_filename(const RunTrace& trace) {
  return trace.problem + "-n" + std::to_string(trace.dim) + "__" + trace.config + "__seed" +
         std::to_string(trace.seed) + ".jsonl";
}

void emit_trace(const RunTrace& trace, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write trace " + path.string());
  out << format_trace(trace);
  out.close();
  if (!out) throw Error("failed writing trace " + path.string());
}

RunTrace read_trace(const fs::path& path) {
  try {
    return parse_trace(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<RunTrace> read_trace_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunTrace> traces;
  for (const auto& f : files) traces.push_back(read_trace(f));
  return traces;
}

Metric parse_metric(const std::string& name) {
  if (name == "f") return Metric::final_f;
  if (name == "oracles") return Metric::oracles;
  if (name == "time") return Metric::time;
  throw Error("unknown metric: " + name + " (expected f, oracles or time)");
}

double ProfileTable::fraction(std::size_t solver, double tau) const {
  if (problems.empty()) return 0.0;
  const auto& row = ratios.at(solver);
  const auto hits = std::count_if(row.begin(), row.end(), [tau](double r) { return r <= tau; });
  return static_cast<double>(hits) / static_cast<double>(problems.size());
}

std::vector<double> ProfileTable::breakpoints() const {
  std::set<double> taus{1.0};
  for (const auto& row : ratios) {
    for (double r : row) {
      if (std::isfinite(r)) taus.insert(r);
    }
  }
  return {taus.begin(), taus.end()};
}

ProfileTable performance_profile(const std::vector<std::string>& solvers,
                                 const std::vector<std::string>& problems,
                                 const std::vector<std::vector<double>>& costs,
                                 const std::vector<std::vector<bool>>& solved) {
  if (solvers.empty()) throw Error("performance profile needs at least one solver");
  if (problems.empty()) throw Error("performance profile needs at least one problem");
  if (costs.size() != solvers.size() || solved.size() != solvers.size()) {
    throw Error("performance profile: table shape mismatch");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  ProfileTable t;
  t.solvers = solvers;
  t.problems = problems;
  t.ratios.assign(solvers.size(), std::vector<double>(problems.size(), inf));
  for (std::size_t p = 0; p < problems.size(); ++p) {
    double best = inf;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      if (costs[s].size() != problems.size() || solved[s].size() != problems.size()) {
        throw Error("performance profile: table shape mismatch");
      }
      if (!solved[s][p]) continue;
      if (!(costs[s][p] > 0.0) || !std::isfinite(costs[s][p])) {
        throw Error("performance profile: costs of solved cells must be positive and finite");
      }
      best = std::min(best, costs[s][p]);
    }
    if (!std::isfinite(best)) continue;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      if (solved[s][p]) t.ratios[s][p] = costs[s][p] / best;
    }
  }
  return t;
}

ProfileTable performance_profile(const std::vector<RunTrace>& traces, Metric metric) {
  std::vector<std::string> solvers, problems;
  std::map<std::string, std::size_t> solver_idx, problem_idx;
  for (const auto& t : traces) {
    if (solver_idx.emplace(t.config, solvers.size()).second) solvers.push_back(t.config);
    const auto key = problem_key(t);
    if (problem_idx.emplace(key, problems.size()).second) problems.push_back(key);
  }
  std::vector<std::vector<double>> costs(solvers.size(), std::vector<double>(problems.size(), 0.0));
  std::vector<std::vector<bool>> solved(solvers.size(), std::vector<bool>(problems.size(), false));
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& t : traces) {
    const std::size_t s = solver_idx.at(t.config);
    const std::size_t p = problem_idx.at(problem_key(t));
    if (!seen.emplace(s, p).second) throw Error("duplicate trace for " + t.config + " on " + problem_key(t));
    solved[s][p] = t.status == RunStatus::CONVERGED;
    switch (metric) {
      case Metric::oracles: costs[s][p] = static_cast<double>(t.oracles); break;
      case Metric::time: costs[s][p] = std::max(t.time_ms, 1e-6); break;
      case Metric::final_f: costs[s][p] = t.f_final; break;
    }
  }
  if (metric == Metric::final_f) {
    for (std::size_t p = 0; p < problems.size(); ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        if (solved[s][p]) best = std::min(best, costs[s][p]);
      }
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        if (solved[s][p]) costs[s][p] = costs[s][p] - best + 1.0;
      }
    }
  }
  return performance_profile(solvers, problems, costs, solved);
}

std::string profile_csv(const ProfileTable& table) {
  std::string s = "solver,tau,fraction\n";
  const auto taus = table.breakpoints();
  for (std::size_t i = 0; i < table.solvers.size(); ++i) {
    for (double tau : taus) {
      s += table.solvers[i] + "," + fmt_real(tau) + "," + fmt_real(table.fraction(i, tau)) + "\n";
    }
  }
  return s;
}

}  // namespace nmr::bench
