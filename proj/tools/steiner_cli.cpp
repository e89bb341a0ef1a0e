// steiner: command-line front end for the Steiner-system experiments.
//
// Exit codes: 0 success, 1 experiment failure, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "steiner/steiner.hpp"

namespace fs = std::filesystem;
using namespace steiner;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

FieldPolicy parse_policy(const std::string& s) {
  if (s == "minimal") return FieldPolicy::kMinimal;
  if (s == "wide") return FieldPolicy::kWide;
  throw UsageError("--policy must be minimal or wide");
}

// Options shared by pipeline and threshold-scan; unset flags fall back to the config file.
struct PipelineFlags {
  std::string config_path;
  std::optional<int> n, k, trials, jobs, stage_retries;
  std::optional<double> p, nu, target;
  std::optional<std::uint64_t> seed, budget_ms;
  std::optional<std::string> out_dir, policy;
  bool skip_in_h = false;
  std::string grid;

  void add(CLI::App* c, bool scan) {
    c->add_option("--config", config_path, "key=value config file");
    c->add_option("--n", n, "number of vertices");
    c->add_option("--k", k, "edge size");
    if (scan) c->add_option("--p-grid", grid, "ascending comma-separated p values");
    else c->add_option("--p", p, "edge probability of H(n;p)");
    c->add_option("--trials", trials, "number of seeded trials");
    c->add_option("--seed", seed, "master seed");
    c->add_option("--jobs", jobs, "worker threads");
    c->add_option("--nu", nu, "nibble bite parameter");
    c->add_option("--target-density", target, "nibble stops once the leave density is at most this");
    c->add_option("--policy", policy, "field policy: minimal or wide");
    c->add_option("--retries", stage_retries, "nibble restarts per trial");
    c->add_option("--budget-ms", budget_ms, "solver time budget per attempt");
    c->add_option("--out-dir", out_dir, "output directory");
    c->add_flag("--skip-in-h", skip_in_h, "keep leave-decomposition edges that lie in H instead of absorbing them");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : [&] {
      try {
        return parse_config(read_file(config_path));
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }();
    apply_env_overrides(c);
    if (n) c.n = *n;
    if (k) c.k = *k;
    if (p) c.p = *p;
    if (!grid.empty()) {
      c.p_grid.clear();
      std::stringstream ss(grid);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          c.p_grid.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("--p-grid: bad number \"" + item + "\"");
        }
      }
    }
    if (trials) c.trials = *trials;
    if (seed) c.seed = *seed;
    if (jobs) c.jobs = *jobs;
    if (nu) c.nu = *nu;
    if (target) c.target_density = *target;
    if (policy) c.policy = parse_policy(*policy);
    if (stage_retries) c.stage_retries = *stage_retries;
    if (budget_ms) c.solver_budget_ms = *budget_ms;
    if (out_dir) c.out_dir = *out_dir;
    if (skip_in_h) c.skip_in_h = true;
    try {
      validate(c);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

int cmd_pipeline(const PipelineFlags& flags) {
  ExperimentConfig c = flags.resolve();
  c.command = "pipeline";
  const fs::path out(c.out_dir);
  fs::create_directories(out);
  const PipelineConfig pc = pipeline_config(c);
  auto results = run_indexed(static_cast<std::size_t>(c.trials), c.jobs, [&](std::size_t i) {
    return run_pipeline(c.n, c.k, c.p, trial_seed(c.seed, i), pc);
  });

  std::vector<TrialRow> rows;
  json report;
  report["config"] = to_text(c);
  report["trials"] = json::array();
  int successes = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    rows.push_back(trial_row(i, r));
    json tj = to_json(r.provenance);
    tj["trial"] = i;
    tj["success"] = r.success;
    tj["failure"] = r.failure;
    if (r.success) {
      ++successes;
      const std::string design = "design_" + std::to_string(i) + ".txt";
      const std::string hfile = "h_" + std::to_string(i) + ".txt";
      save_hypergraph((out / design).string(), r.design);
      save_hypergraph((out / hfile).string(), r.h);
      write_json_file((out / ("design_" + std::to_string(i) + ".json")).string(), tj);
      tj["design_file"] = design;
      tj["hypergraph_file"] = hfile;
      tj["verified"] = true;
    }
    report["trials"].push_back(tj);
  }
  report["successes"] = successes;
  {
    auto f = open_out(out / "pipeline.csv");
    write_trial_csv(f, rows);
  }
  {
    auto f = open_out(out / "pipeline_timings.csv");
    f << "trial,seconds\n";
    for (const auto& r : rows) f << r.trial << ',' << fmt_double(r.seconds) << '\n';
  }
  {
    auto f = open_out(out / "config.txt");
    f << to_text(c);
  }
  write_json_file((out / "report.json").string(), report);
  std::cout << "pipeline n=" << c.n << " k=" << c.k << " p=" << fmt_double(c.p) << ": " << successes << "/"
            << c.trials << " verified designs, outputs in " << out.string() << "\n";
  return successes > 0 ? kOk : kFailed;
}

int cmd_scan(const PipelineFlags& flags) {
  ExperimentConfig c = flags.resolve();
  c.command = "threshold-scan";
  const fs::path out(c.out_dir);
  std::vector<TrialRow> details;
  const auto rows = threshold_scan(c.n, c.k, c.p_grid, c.trials, c.seed, pipeline_config(c), c.jobs, &details);
  {
    auto f = open_out(out / "threshold_scan.csv");
    write_scan_csv(f, rows);
  }
  {
    auto f = open_out(out / "threshold_scan_trials.csv");
    write_trial_csv(f, details);
  }
  write_scan_csv(std::cout, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steiner systems in random hypergraphs via a randomized algebraic construction"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "sample H(n;p) and write it in hypergraph format");
  int g_n = 0, g_k = 3;
  double g_p = 1.0;
  std::uint64_t g_seed = 1;
  std::string g_out;
  gen->add_option("--n", g_n, "number of vertices")->required();
  gen->add_option("--k", g_k, "edge size");
  gen->add_option("--p", g_p, "edge probability");
  gen->add_option("--seed", g_seed, "seed");
  gen->add_option("--out", g_out, "output file")->required();

  // pipeline / threshold-scan
  PipelineFlags pf, sf;
  auto* pipe = app.add_subcommand("pipeline", "run the full construction over seeded trials");
  pf.add(pipe, false);
  auto* scan = app.add_subcommand("threshold-scan", "success rate of the pipeline across a p grid");
  sf.add(scan, true);

  // nibble-stats
  auto* nib = app.add_subcommand("nibble-stats", "nibble trace against the predicted leave and degree curves");
  int ns_n = 403, ns_k = 3, ns_seeds = 20, ns_steps = 20;
  double ns_p = 1.0, ns_nu = 0.1, ns_tol = 0.1;
  std::uint64_t ns_seed = 1;
  bool ns_template = false, ns_diag = false;
  std::string ns_out = "nibble_trace.csv";
  nib->add_option("--n", ns_n, "number of vertices");
  nib->add_option("--k", ns_k, "edge size");
  nib->add_option("--p", ns_p, "edge probability");
  nib->add_option("--nu", ns_nu, "bite parameter");
  nib->add_option("--steps", ns_steps, "number of bites");
  nib->add_option("--seeds", ns_seeds, "number of seeds");
  nib->add_option("--seed", ns_seed, "master seed");
  nib->add_option("--tolerance", ns_tol, "relative tolerance against the predicted curves");
  nib->add_flag("--with-template", ns_template, "remove the algebraic template first (minimal field policy)");
  nib->add_flag("--diagnostics", ns_diag, "log typicality defect and affine bound per step");
  nib->add_option("--out", ns_out, "trace CSV");

  // verify-operators
  auto* vop = app.add_subcommand("verify-operators", "machine-check the operator-family properties");
  int vo_k = 3, vo_m = 4;
  std::uint64_t vo_seed = 1;
  std::string vo_out;
  vop->add_option("--k", vo_k, "edge size");
  vop->add_option("--m", vo_m, "field GF(2^m)");
  vop->add_option("--seed", vo_seed, "seed for sampled checks");
  vop->add_option("--out", vo_out, "JSON report");

  // decompose
  auto* dec = app.add_subcommand("decompose", "exact K_k-decomposition of a (k-1)-uniform leave file");
  std::string d_in, d_out;
  std::uint64_t d_budget = 30000, d_seed = 1;
  int d_restarts = 10;
  dec->add_option("--in", d_in, "leave in hypergraph format")->required();
  dec->add_option("--out", d_out, "write the decomposition here");
  dec->add_option("--budget-ms", d_budget, "time budget");
  dec->add_option("--restarts", d_restarts, "restart count");
  dec->add_option("--seed", d_seed, "seed");

  // frac-hitting
  auto* fh = app.add_subcommand("frac-hitting", "hitting times of facet cover and fractional decomposition");
  int f_n = 12, f_k = 3, f_trials = 100, f_jobs = 1;
  std::uint64_t f_seed = 1;
  std::string f_mode = "float", f_out = "frac_hitting.csv";
  fh->add_option("--n", f_n, "number of vertices");
  fh->add_option("--k", f_k, "edge size");
  fh->add_option("--trials", f_trials, "number of trials");
  fh->add_option("--seed", f_seed, "master seed");
  fh->add_option("--jobs", f_jobs, "worker threads");
  fh->add_option("--mode", f_mode, "float or rational");
  fh->add_option("--out", f_out, "CSV output");

  // verify
  auto* ver = app.add_subcommand("verify", "check a design file, optionally against a hypergraph file");
  std::string v_design, v_h;
  ver->add_option("--design", v_design, "design file")->required();
  ver->add_option("--hypergraph", v_h, "hypergraph the design must lie in");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      if (g_n < g_k || g_k < 2 || !(g_p >= 0 && g_p <= 1)) throw UsageError("need 2 <= k <= n and 0 <= p <= 1");
      const Hypergraph h = sample_hnp(g_n, g_k, g_p, g_seed);
      save_hypergraph(g_out, h);
      std::cout << "wrote " << h.size() << " edges to " << g_out << "\n";
      return kOk;
    }
    if (*pipe) return cmd_pipeline(pf);
    if (*scan) return cmd_scan(sf);
    if (*nib) {
      if (ns_n < ns_k || ns_k < 2 || ns_seeds < 1 || ns_steps < 1) throw UsageError("bad nibble-stats parameters");
      const Hypergraph h = sample_hnp(ns_n, ns_k, ns_p, ns_seed);
      Template t(ns_n, ns_k, {});
      if (ns_template) {
        auto f = std::make_shared<const FieldCtx>(field_bits_for(ns_n, FieldPolicy::kMinimal));
        std::vector<Injection> pis;
        for (std::size_t j = 0; j < required_layers(ns_k); ++j) pis.push_back(sample_injection(ns_n, f, ns_seed, j));
        t = build_template(h, pis);
      }
      auto f = open_out(ns_out);
      double worst_l = 0, worst_d = 0;
      bool header = true;
      for (int s = 0; s < ns_seeds; ++s) {
        const std::uint64_t seed = trial_seed(ns_seed, static_cast<std::uint64_t>(s));
        NibbleOptions opt;
        opt.nu = ns_nu;
        opt.diagnostics = ns_diag;
        NibbleState st = nibble_init(h, t, ns_nu);
        for (int step = 0; step < ns_steps; ++step) nibble_step(st, seed, opt);
        write_trace_csv(f, st.trace(), header, std::to_string(seed));
        header = false;
        for (const auto& r : st.trace()) {
          worst_l = std::max(worst_l, std::abs(static_cast<double>(r.leave) / r.predicted_leave - 1));
          worst_d = std::max(worst_d, std::abs(r.degree / r.predicted_degree - 1));
        }
      }
      std::cout << "max relative deviation: |L_t| " << fmt_double(worst_l) << ", D_t " << fmt_double(worst_d)
                << " (trace in " << ns_out << ")\n";
      return worst_l <= ns_tol && worst_d <= ns_tol ? kOk : kFailed;
    }
    if (*vop) {
      if (vo_k < 2 || vo_k > kMaxK || vo_m < 2 || vo_m > 16) throw UsageError("need 2 <= k <= 8 and 2 <= m <= 16");
      const OperatorReport rep = verify_properties(vo_k, FieldCtx(vo_m), vo_seed);
      const json j = to_json(rep);
      if (!vo_out.empty()) write_json_file(vo_out, j);
      for (const auto& c : rep.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases)"
                  << (c.passed ? "" : " counterexample: " + c.counterexample) << "\n";
      return rep.all_passed() ? kOk : kFailed;
    }
    if (*dec) {
      const Hypergraph leave = load_hypergraph(d_in);
      DecompositionProblem p(leave, leave.k() + 1);
      p.budget_ms = d_budget;
      p.restarts = d_restarts;
      p.seed = d_seed;
      const DecompositionResult r = decompose_exact(p);
      std::cout << to_string(r.status) << (r.reason.empty() ? "" : " (" + r.reason + ")") << ": " << r.edges.size()
                << " edges, " << r.nodes << " nodes, " << r.restarts_used << " restarts\n";
      if (r.status == SolveStatus::kSolved && !d_out.empty()) save_hypergraph(d_out, r.edges);
      return r.status == SolveStatus::kSolved ? kOk : kFailed;
    }
    if (*fh) {
      LpMode mode;
      if (f_mode == "float") mode = LpMode::kFloat;
      else if (f_mode == "rational") mode = LpMode::kRational;
      else throw UsageError("--mode must be float or rational");
      if (f_n < f_k || f_k < 2 || f_trials < 1 || f_jobs < 1) throw UsageError("bad frac-hitting parameters");
      const auto rows = hitting_trials(f_n, f_k, f_trials, f_seed, mode, f_jobs);
      auto f = open_out(f_out);
      write_hitting_csv(f, rows);
      int equal = 0;
      bool ordered = true;
      for (const auto& r : rows) {
        equal += r.times.equal() ? 1 : 0;
        ordered = ordered && r.times.t_frac >= r.times.t_cover;
      }
      std::cout << "t_frac = t_cover in " << equal << "/" << rows.size() << " trials (CSV in " << f_out << ")\n";
      return ordered ? kOk : kFailed;
    }
    if (*ver) {
      const Design d = load_hypergraph(v_design);
      std::optional<Hypergraph> h;
      if (!v_h.empty()) h = load_hypergraph(v_h);
      std::string why;
      if (h && (h->n() != d.n() || h->k() != d.k())) why = "design and hypergraph parameters differ";
      else verify_steiner(d, h ? &*h : nullptr, &why);
      if (why.empty()) {
        std::cout << "valid (" << d.n() << "," << d.k() << "," << d.k() - 1 << ")-Steiner system"
                  << (h ? " inside the given hypergraph" : "") << "\n";
        return kOk;
      }
      std::cout << "invalid: " << why << "\n";
      return kFailed;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
