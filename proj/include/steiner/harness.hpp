#pragma once

// Experiment plumbing: a key=value config with a schema version, trial
// fan-out over worker threads with results merged in trial order, and the
// p-grid threshold scan.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "steiner/absorb.hpp"
#include "steiner/fractional.hpp"
#include "steiner/io.hpp"

namespace steiner {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentConfig {
  std::string command = "pipeline";
  int n = 63;
  int k = 3;
  double p = 1.0;
  std::vector<double> p_grid{0.7, 0.8, 0.9, 0.95, 1.0};
  double nu = 0.1;
  double target_density = 0.6;
  FieldPolicy policy = FieldPolicy::kMinimal;
  std::uint64_t seed = 1;
  int trials = 20;
  int jobs = 1;
  int stage_retries = 5;
  int absorb_retries = 3;
  std::uint64_t solver_budget_ms = 30000;
  int solver_restarts = 10;
  bool skip_in_h = false;
  LpMode lp_mode = LpMode::kFloat;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

namespace harness_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw Error("config: " + key + " expects a number, got \"" + v + "\"");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw Error("config: " + key + " expects an integer, got \"" + v + "\"");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config: " + key + " expects true or false, got \"" + v + "\"");
}

inline std::vector<double> parse_grid(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

}  // namespace harness_detail

inline std::string grid_text(const std::vector<double>& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + fmt_double(g[i]);
  return s;
}

/// Throws Error on any out-of-range parameter.
inline void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& m) {
    if (!ok) throw Error("config: " + m);
  };
  need(c.k >= 2 && c.k <= kMaxK, "k must lie in 2.." + std::to_string(kMaxK));
  need(c.n >= c.k && c.n <= kMaxN, "n must lie in k.." + std::to_string(kMaxN));
  need(c.p >= 0.0 && c.p <= 1.0, "p must lie in [0, 1]");
  need(std::is_sorted(c.p_grid.begin(), c.p_grid.end()), "p_grid must be ascending");
  for (double p : c.p_grid) need(p >= 0.0 && p <= 1.0, "p_grid values must lie in [0, 1]");
  need(c.nu > 0.0 && c.nu <= 1.0, "nu must lie in (0, 1]");
  need(c.target_density > 0.0 && c.target_density <= 1.0, "target_density must lie in (0, 1]");
  need(c.trials >= 1, "trials must be positive");
  need(c.jobs >= 1, "jobs must be positive");
  need(c.stage_retries >= 0 && c.absorb_retries >= 0, "retry budgets must be non-negative");
  need(c.solver_restarts >= 1, "solver_restarts must be positive");
}

inline std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "schema_version=" << kConfigSchemaVersion << '\n'
     << "command=" << c.command << '\n'
     << "n=" << c.n << '\n'
     << "k=" << c.k << '\n'
     << "p=" << fmt_double(c.p) << '\n'
     << "p_grid=" << grid_text(c.p_grid) << '\n'
     << "nu=" << fmt_double(c.nu) << '\n'
     << "target_density=" << fmt_double(c.target_density) << '\n'
     << "field_policy=" << (c.policy == FieldPolicy::kMinimal ? "minimal" : "wide") << '\n'
     << "seed=" << c.seed << '\n'
     << "trials=" << c.trials << '\n'
     << "jobs=" << c.jobs << '\n'
     << "stage_retries=" << c.stage_retries << '\n'
     << "absorb_retries=" << c.absorb_retries << '\n'
     << "solver_budget_ms=" << c.solver_budget_ms << '\n'
     << "solver_restarts=" << c.solver_restarts << '\n'
     << "skip_in_h=" << (c.skip_in_h ? "true" : "false") << '\n'
     << "lp_mode=" << (c.lp_mode == LpMode::kFloat ? "float" : "rational") << '\n'
     << "out_dir=" << c.out_dir << '\n';
  return os.str();
}

/// Parses key=value lines ('#' comments allowed). Missing keys keep their
/// defaults; unknown keys and a wrong schema_version are errors.
inline ExperimentConfig parse_config(const std::string& text) {
  using namespace harness_detail;
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  bool versioned = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (key == "schema_version") {
      if (parse_int(key, v) != kConfigSchemaVersion)
        throw Error("config: unsupported schema_version " + v + " (this build reads " +
                    std::to_string(kConfigSchemaVersion) + ")");
      versioned = true;
    } else if (key == "command") c.command = v;
    else if (key == "n") c.n = static_cast<int>(parse_int(key, v));
    else if (key == "k") c.k = static_cast<int>(parse_int(key, v));
    else if (key == "p") c.p = parse_double(key, v);
    else if (key == "p_grid") c.p_grid = parse_grid(key, v);
    else if (key == "nu") c.nu = parse_double(key, v);
    else if (key == "target_density") c.target_density = parse_double(key, v);
    else if (key == "field_policy") {
      if (v == "minimal") c.policy = FieldPolicy::kMinimal;
      else if (v == "wide") c.policy = FieldPolicy::kWide;
      else throw Error("config: field_policy must be minimal or wide");
    } else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "trials") c.trials = static_cast<int>(parse_int(key, v));
    else if (key == "jobs") c.jobs = static_cast<int>(parse_int(key, v));
    else if (key == "stage_retries") c.stage_retries = static_cast<int>(parse_int(key, v));
    else if (key == "absorb_retries") c.absorb_retries = static_cast<int>(parse_int(key, v));
    else if (key == "solver_budget_ms") c.solver_budget_ms = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "solver_restarts") c.solver_restarts = static_cast<int>(parse_int(key, v));
    else if (key == "skip_in_h") c.skip_in_h = parse_bool(key, v);
    else if (key == "lp_mode") {
      if (v == "float") c.lp_mode = LpMode::kFloat;
      else if (v == "rational") c.lp_mode = LpMode::kRational;
      else throw Error("config: lp_mode must be float or rational");
    } else if (key == "out_dir") c.out_dir = v;
    else throw Error("config: unknown key \"" + key + "\"");
  }
  if (!versioned) throw Error("config: missing schema_version");
  validate(c);
  return c;
}

/// STEINER_SEED and STEINER_OUT_DIR override the seed and output directory.
inline void apply_env_overrides(ExperimentConfig& c) {
  if (const char* s = std::getenv("STEINER_SEED"); s && *s)
    c.seed = static_cast<std::uint64_t>(harness_detail::parse_int("STEINER_SEED", s));
  if (const char* d = std::getenv("STEINER_OUT_DIR"); d && *d) c.out_dir = d;
}

inline PipelineConfig pipeline_config(const ExperimentConfig& c) {
  PipelineConfig p;
  p.policy = c.policy;
  p.nu = c.nu;
  p.target_density = c.target_density;
  p.stage_retries = c.stage_retries;
  p.absorb_retries = c.absorb_retries;
  p.solver_budget_ms = c.solver_budget_ms;
  p.solver_restarts = c.solver_restarts;
  p.skip_in_h = c.skip_in_h;
  return p;
}

/// Seed of trial i under a master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) { return hash_key({stream::kTrial, master, i}); }

/// Evaluates fn(0..count-1) on `jobs` threads; results come back in index
/// order. The first exception thrown by any trial is rethrown.
template <class Fn>
auto run_indexed(std::size_t count, int jobs, Fn&& fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<int>(jobs, static_cast<int>(count)); ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
  bool success = false;
  std::string failure;
  std::size_t attempts = 0;
  std::uint64_t template_edges = 0;
  std::uint64_t leave = 0;
  std::uint64_t s_size = 0;
  std::uint64_t s_in_h = 0;
  std::uint64_t absorbed = 0;
  double seconds = 0.0;
};

inline TrialRow trial_row(std::size_t i, const PipelineResult& r) {
  TrialRow row;
  const Provenance& pv = r.provenance;
  row.trial = i;
  row.seed = pv.seed;
  row.p = pv.p;
  row.success = r.success;
  row.failure = r.failure;
  row.attempts = pv.attempts.size();
  for (auto t : pv.template_layers) row.template_edges += t;
  if (!pv.attempts.empty()) {
    const auto& a = pv.attempts.back();
    row.leave = a.leave;
    row.s_size = a.s_size;
    row.s_in_h = a.s_in_h;
    row.absorbed = a.absorbed;
  }
  row.seconds = pv.seconds;
  return row;
}

inline const char* kTrialHeader = "trial,seed,p,success,failure,attempts,template_edges,leave,s_size,s_in_h,absorbed";

/// Deterministic columns only; timings go to a separate file.
inline void write_trial_csv(std::ostream& os, const std::vector<TrialRow>& rows) {
  os << kTrialHeader << '\n';
  for (const auto& r : rows)
    os << r.trial << ',' << r.seed << ',' << fmt_double(r.p) << ',' << (r.success ? 1 : 0) << ','
       << (r.failure.empty() ? "-" : r.failure) << ',' << r.attempts << ',' << r.template_edges << ',' << r.leave
       << ',' << r.s_size << ',' << r.s_in_h << ',' << r.absorbed << '\n';
}

struct ScanRow {
  double p = 0.0;
  int successes = 0;
  int trials = 0;
  double rate() const noexcept { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

/// Success rate of run_pipeline per p. Trial i uses the same seed at every p,
/// so its hypergraphs are nested across the grid.
inline std::vector<ScanRow> threshold_scan(int n, int k, const std::vector<double>& p_grid, int trials,
                                           std::uint64_t seed, const PipelineConfig& cfg, int jobs = 1,
                                           std::vector<TrialRow>* details = nullptr) {
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw Error("p grid must be ascending");
  std::vector<ScanRow> out;
  for (double p : p_grid) {
    ScanRow row;
    row.p = p;
    row.trials = trials;
    auto rows = run_indexed(static_cast<std::size_t>(trials), jobs, [&](std::size_t i) {
      return trial_row(i, run_pipeline(n, k, p, trial_seed(seed, i), cfg));
    });
    for (const auto& r : rows) row.successes += r.success ? 1 : 0;
    if (details) details->insert(details->end(), rows.begin(), rows.end());
    out.push_back(row);
  }
  return out;
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "p,successes,trials,rate\n";
  for (const auto& r : rows)
    os << fmt_double(r.p) << ',' << r.successes << ',' << r.trials << ',' << fmt_double(r.rate()) << '\n';
}

struct HittingRow {
  std::uint64_t seed = 0;
  int n = 0, k = 0;
  HittingTimes times;
};

inline std::vector<HittingRow> hitting_trials(int n, int k, int trials, std::uint64_t seed, LpMode mode, int jobs = 1) {
  return run_indexed(static_cast<std::size_t>(trials), jobs, [&](std::size_t i) {
    HittingRow r;
    r.seed = trial_seed(seed, i);
    r.n = n;
    r.k = k;
    r.times = mode == LpMode::kFloat ? hitting_times<double>(n, k, r.seed) : hitting_times<Rational>(n, k, r.seed);
    return r;
  });
}

inline void write_hitting_csv(std::ostream& os, const std::vector<HittingRow>& rows) {
  os << "seed,n,k,t_cover,t_frac,equal\n";
  for (const auto& r : rows)
    os << r.seed << ',' << r.n << ',' << r.k << ',' << r.times.t_cover << ',' << r.times.t_frac << ','
       << (r.times.equal() ? 1 : 0) << '\n';
}

}  // namespace steiner
