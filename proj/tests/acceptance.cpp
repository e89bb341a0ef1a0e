// Acceptance run: one PASS/FAIL line per criterion, CSV evidence in --out-dir.
// Criteria 4-8 produce deterministic CSVs; criterion 9 reruns them and
// compares bytes. Exit status is 0 only when every criterion passes.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oracles.hpp"

using namespace steiner;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::string csv;  // evidence; byte-compared by criterion 9
};

void require(Verdict& v, bool ok, const std::string& what) {
  if (ok) return;
  if (v.pass) v.detail = "first failure: " + what + "; ";
  v.pass = false;
}

std::string pct(double x) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << 100 * x << "%";
  return os.str();
}

Edge random_non_algebraic(int n, const Injection& pi, std::mt19937_64& g) {
  while (true) {
    const Edge e = colex_unrank(g() % binom(n, 3), 3);
    if (!pi.sum(e).is_zero()) return e;
  }
}

Verdict field_suite() {
  Verdict v;
  std::uint64_t checks = 0;
  for (int m = 2; m <= 8; ++m) {
    const FieldCtx f(m);
    const auto q = static_cast<std::uint32_t>(f.size());
    for (std::uint32_t a = 0; a < q; ++a) {
      require(v, f.mul(fe(a), f.one()) == fe(a) && fe(a) + fe(a) == f.zero(), "identity m=" + std::to_string(m));
      if (a) require(v, f.mul(fe(a), f.inv(fe(a))) == f.one(), "inverse m=" + std::to_string(m));
      for (std::uint32_t b = 0; b < q; ++b) {
        const FieldElement ab = f.mul(fe(a), fe(b));
        require(v, ab.bits == oracle::ref_mul(a, b, m, f.modulus()) && ab == f.mul(fe(b), fe(a)),
                "product m=" + std::to_string(m));
        for (std::uint32_t c = 0; c < q; ++c) {
          require(v, f.mul(ab, fe(c)) == f.mul(fe(a), f.mul(fe(b), fe(c))), "associativity");
          require(v, f.mul(fe(a), fe(b) + fe(c)) == ab + f.mul(fe(a), fe(c)), "distributivity");
          ++checks;
        }
      }
    }
  }
  std::mt19937_64 g(7);
  for (int m = 9; m <= 16; ++m) {
    const FieldCtx f(m);
    for (int i = 0; i < 10000; ++i) {
      const auto a = static_cast<std::uint32_t>(g() & f.mask()), b = static_cast<std::uint32_t>(g() & f.mask()),
                 c = static_cast<std::uint32_t>(g() & f.mask());
      require(v, f.mul(fe(a), fe(b)).bits == oracle::ref_mul(a, b, m, f.modulus()), "sampled product");
      require(v, f.mul(f.mul(fe(a), fe(b)), fe(c)) == f.mul(fe(a), f.mul(fe(b), fe(c))), "sampled associativity");
      require(v, f.mul(fe(a), fe(b) + fe(c)) == f.mul(fe(a), fe(b)) + f.mul(fe(a), fe(c)), "sampled distributivity");
      if (a) require(v, f.mul(fe(a), f.inv(fe(a))) == f.one(), "sampled inverse");
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    const FieldCtx f(2 + static_cast<int>(g() % 3));
    const int rows = 1 + static_cast<int>(g() % 4), cols = 1 + static_cast<int>(g() % 3);
    const Matrix a = oracle::random_matrix(f, rows, cols, g);
    std::uint64_t kernel = 0, space = 1, im = 1;
    std::set<FieldVector> image;
    for (const auto& x : oracle::all_vectors(f, cols)) {
      const FieldVector y = apply(f, a, x);
      kernel += std::all_of(y.begin(), y.end(), [](FieldElement e) { return e.is_zero(); });
      image.insert(y);
    }
    for (int i = 0; i < cols; ++i) space *= f.size();
    for (int i = 0; i < rank(f, a); ++i) im *= f.size();
    require(v, kernel * image.size() == space && im == image.size(), "rank-nullity");
  }
  int preimages = 0;
  for (int m = 2; m <= 4; ++m) {
    const FieldCtx f(m);
    for (int trial = 0; trial < 150; ++trial, ++preimages) {
      const int rows = 1 + static_cast<int>(g() % 3), cols = 1 + static_cast<int>(g() % 3);
      const Matrix a = oracle::random_matrix(f, rows, cols, g, 0.4);
      const FieldVector y =
          trial % 2 ? oracle::random_vector(f, rows, g) : apply(f, a, oracle::random_vector(f, cols, g));
      std::set<FieldVector> expected, got;
      for (const auto& x : oracle::all_vectors(f, cols))
        if (apply(f, a, x) == y) expected.insert(x);
      const auto s = affine_preimage(f, a, y);
      if (s) {
        for (const auto& coeffs : oracle::all_vectors(f, s->dimension())) {
          FieldVector x = s->point;
          for (int d = 0; d < s->dimension(); ++d)
            for (int j = 0; j < cols; ++j) x[j] += f.mul(coeffs[d], s->directions[d][j]);
          got.insert(x);
        }
      }
      require(v, got == expected, "affine_preimage m=" + std::to_string(m));
    }
  }
  v.detail += std::to_string(checks) + " exhaustive triples for m<=8, 80000 sampled, 500 rank-nullity matrices, " +
              std::to_string(preimages) + " preimages";
  return v;
}

Verdict operator_suite() {
  Verdict v;
  const std::map<int, std::pair<std::size_t, std::size_t>> sizes{{3, {15, 25}}, {4, {36, 113}}};
  int items = 0;
  for (int k : {3, 4}) {
    const OperatorFamily fam = build_families(k);
    require(v, fam.vo.size() == sizes.at(k).first, "|VO| at k=" + std::to_string(k));
    require(v, fam.eo.size() == sizes.at(k).second, "|EO| at k=" + std::to_string(k));
    require(v, fam.fo.size() == absorber_facet_count(k), "|FO| at k=" + std::to_string(k));
    for (int m : {4, 7}) {
      const OperatorReport rep = verify_properties(k, FieldCtx(m));
      for (const auto& c : rep.checks) {
        require(v, c.passed, c.name + " k=" + std::to_string(k) + " m=" + std::to_string(m) + " " + c.counterexample);
        ++items;
      }
      require(v, rep.screen_mismatches == 0, "vertex screen k=" + std::to_string(k));
    }
  }
  v.detail += std::to_string(items) + " property items over k in {3,4}, fields GF(16) and GF(128); |VO| 15/36, M 25/113";
  return v;
}

Verdict absorber_invariants() {
  Verdict v;
  const int n = 63;
  const auto f = std::make_shared<const FieldCtx>(7);
  const Hypergraph h = Hypergraph::complete(n, 3);
  const OperatorFamily fam = build_families(3);
  std::mt19937_64 g(2024);
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 1000; ++seed) {
    const Injection pi = sample_injection(n, f, seed);
    const Template t = build_template(h, {pi});
    for (int j = 0; j < 5 && checked < 1000; ++j) {
      const Edge x = random_non_algebraic(n, pi, g);
      const auto found = find_absorbers(x, h, t.layer(0).edges, pi, 0, 10, hash_key({seed, 7, std::uint64_t(j)}), 0, 20000);
      for (const Absorber& a : found.absorbers) {
        if (checked == 1000) break;
        const std::string why = oracle::absorber_invariants(a, pi, fam);
        require(v, why.empty(), why);
        for (const Edge& e : a.alg) require(v, t.edges().contains(e), "algebraic edge outside T");
        for (const Edge& e : a.non_alg) require(v, h.contains(e), "non-algebraic edge outside H");
        ++checked;
      }
    }
  }
  v.detail += std::to_string(checked) + " absorbers at n=63, GF(128)";
  return v;
}

Verdict absorber_count() {
  Verdict v;
  std::ostringstream csv;
  csv << "n,x,library,oracle\n";
  auto run = [&](int n, int m, int targets, std::uint64_t rng_seed) {
    const auto f = std::make_shared<const FieldCtx>(m);
    const Hypergraph h = Hypergraph::complete(n, 3);
    std::mt19937_64 g(rng_seed);
    std::uint64_t total = 0;
    for (int trial = 0; trial < targets; ++trial) {
      const Injection pi = sample_injection(n, f, static_cast<std::uint64_t>(trial));
      const Template t = build_template(h, {pi});
      const Edge x = random_non_algebraic(n, pi, g);
      const auto found = find_absorbers(x, h, t.layer(0).edges, pi, 0, ~std::size_t{0}, 1);
      const std::uint64_t want = oracle::absorber_count_k3(x, h, t.layer(0).edges, pi);
      require(v, found.exhaustive && found.absorbers.size() == want, "count at n=" + std::to_string(n) + " x=" + x.str());
      csv << n << ',' << x.str() << ',' << found.absorbers.size() << ',' << want << '\n';
      total += want;
    }
    return total;
  };
  const std::uint64_t at15 = run(15, 4, 10, 21);
  // at n = 15 all 15 nonzero elements would be absorber vertices; a size up
  // shows the agreement is not only on zeros
  const std::uint64_t at31 = run(31, 5, 4, 23);
  v.detail += "10 targets at n=15 GF(16) agree, total " + std::to_string(at15) + " absorbers; companion n=31 GF(32): 4 targets, total " +
              std::to_string(at31);
  v.csv = csv.str();
  return v;
}

Verdict nibble_statistics() {
  Verdict v;
  const int n = 403, k = 3, seeds = 20, steps = 20;
  const double nu = 0.1, tol = 0.10;
  const Hypergraph h = Hypergraph::complete(n, k);
  std::ostringstream csv;
  csv << "seed,t,leave,predicted_leave,degree,predicted_degree\n";
  double worst_l = 0, worst_d = 0;
  int divisible = 0, rows = 0;
  NibbleOptions opt;
  opt.nu = nu;
  opt.check_divisibility = false;  // counted here instead
  for (int seed = 0; seed < seeds; ++seed) {
    NibbleState s(h, nu);
    s.record(opt, static_cast<std::uint64_t>(seed));
    divisible += is_k_divisible(s.leave(), k);
    for (int t = 0; t < steps; ++t) {
      if (!s.advance(static_cast<std::uint64_t>(seed), false)) {
        require(v, false, "nibble stopped early at seed " + std::to_string(seed));
        break;
      }
      s.record(opt, static_cast<std::uint64_t>(seed));
      divisible += is_k_divisible(s.leave(), k);
    }
    for (const auto& r : s.trace()) {
      const double dl = std::abs(static_cast<double>(r.leave) / r.predicted_leave - 1);
      const double dd = std::abs(r.degree / r.predicted_degree - 1);
      worst_l = std::max(worst_l, dl);
      worst_d = std::max(worst_d, dd);
      csv << seed << ',' << r.t << ',' << r.leave << ',' << fmt_double(r.predicted_leave) << ','
          << fmt_double(r.degree) << ',' << fmt_double(r.predicted_degree) << '\n';
      ++rows;
    }
  }
  require(v, worst_l <= tol, "|L_t| deviation " + pct(worst_l));
  require(v, worst_d <= tol, "D_t deviation " + pct(worst_d));
  require(v, divisible == rows, "leave lost 3-divisibility");
  v.detail += "max |L_t| deviation " + pct(worst_l) + ", max D_t deviation " + pct(worst_d) + " (tolerance 10%); " +
              std::to_string(divisible) + "/" + std::to_string(rows) + " leaves 3-divisible";
  v.csv = csv.str();
  return v;
}

Verdict exact_cover() {
  Verdict v;
  const Hypergraph k7 = Hypergraph::complete(7, 2);
  const auto sts = decompose_exact(DecompositionProblem(k7, 3));
  require(v, sts.status == SolveStatus::kSolved && verify_decomposition(k7, sts.edges), "STS(7) not found");
  const auto lib = count_decompositions(k7, 3), ref = oracle::count_decompositions(k7, 3);
  require(v, lib == 30 && ref == 30, "STS(7) count " + std::to_string(lib) + " vs " + std::to_string(ref));
  std::ostringstream csv;
  csv << "trial,n,facets,oracle,solver\n";
  std::mt19937_64 g(17);
  int agree = 0, feasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Hypergraph l = oracle::random_leave(6 + static_cast<int>(g() % 4), g);
    DecompositionProblem p(l, 3);
    p.seed = static_cast<std::uint64_t>(trial);
    const auto res = decompose_exact(p);
    const bool want = oracle::decomposable(l, 3);
    const bool ok = (res.status == SolveStatus::kSolved) == want && (!want || verify_decomposition(l, res.edges));
    agree += ok;
    feasible += want;
    csv << trial << ',' << l.n() << ',' << l.size() << ',' << (want ? "feasible" : "infeasible") << ','
        << to_string(res.status) << '\n';
  }
  require(v, agree == 500, "feasibility disagreement");
  v.detail += "STS(7) found; 30 labelled STS(7) by both counters; " + std::to_string(agree) + "/500 instances agree (" +
              std::to_string(feasible) + " feasible)";
  v.csv = csv.str();
  return v;
}

Verdict pipeline_runs(std::string& info) {
  Verdict v;
  std::vector<TrialRow> all;
  std::ostringstream summary, extra;
  const int seeds = 20;
  for (bool skip : {false, true}) {
    PipelineConfig cfg;
    cfg.policy = FieldPolicy::kMinimal;
    cfg.stage_retries = 5;
    cfg.skip_in_h = skip;
    for (int n : {49, 63})
      for (double p : {0.95, 1.0}) {
        int wins = 0;
        std::map<std::string, int> reasons;
        for (int i = 0; i < seeds; ++i) {
          const PipelineResult r = run_pipeline(n, 3, p, trial_seed(1, static_cast<std::uint64_t>(i)), cfg);
          if (r.success) {
            std::string why;
            const bool ok = verify_steiner(r.design, &r.h, &why);
            require(v, ok, "reported success fails verification: " + why);
            wins += ok;
          } else {
            ++reasons[r.failure];
          }
          TrialRow row = trial_row(static_cast<std::size_t>(i), r);
          row.failure = (skip ? "skip_in_h;" : "full;") + (row.failure.empty() ? std::string("-") : row.failure);
          all.push_back(row);
        }
        std::ostringstream cell;
        cell << "n=" << n << " p=" << fmt_double(p) << ": " << wins << "/" << seeds;
        if (!reasons.empty()) cell << " (" << reasons.begin()->first << ")";
        if (!skip) {
          if (p == 1.0) require(v, wins >= 16, "n=" + std::to_string(n) + " p=1 rate " + std::to_string(wins) + "/20 below 16/20");
          summary << cell.str() << "; ";
        } else {
          extra << cell.str() << "; ";
        }
      }
  }
  std::ostringstream csv;
  write_trial_csv(csv, all);
  v.detail += "full absorption: " + summary.str() + "p=0.95 rates are recorded, not gated";
  info = "with S-edges inside H kept rather than absorbed: " + extra.str();
  info.resize(info.size() - 2);
  v.csv = csv.str();
  return v;
}

Verdict fractional_suite() {
  Verdict v;
  std::ostringstream csv;
  const Hypergraph k4 = Hypergraph::complete(4, 3);
  const auto fl = fractional_exists(k4, LpMode::kFloat, true);
  const auto ex = fractional_exists(k4, LpMode::kRational, true);
  require(v, fl.feasible && fl.residual <= 1e-9, "float K_3(K_2^4) residual " + fmt_double(fl.residual));
  require(v, ex.feasible && ex.residual == 0.0, "rational K_3(K_2^4) not exact");
  csv << "edge,float_weight,exact_weight\n";
  for (std::size_t i = 0; i < ex.edges.size(); ++i)
    csv << colex_unrank(ex.edges[i], 3).str() << ',' << fmt_double(fl.weights.at(i)) << ',' << ex.exact_weights.at(i)
        << '\n';
  const auto rows = hitting_trials(12, 3, 100, 1, LpMode::kFloat);
  int equal = 0, ordered = 0;
  for (const auto& r : rows) {
    ordered += r.times.t_frac >= r.times.t_cover;
    equal += r.times.equal();
  }
  require(v, ordered == 100, "t_frac < t_cover in some trial");
  write_hitting_csv(csv, rows);
  v.detail += "K_3(K_2^4) float residual " + fmt_double(fl.residual) + ", rational exact (w = " + ex.exact_weights.at(0) +
              "); t_frac >= t_cover in " + std::to_string(ordered) + "/100; t_frac = t_cover in " + std::to_string(equal) +
              "/100 at n=12 (observational)";
  v.csv = csv.str();
  return v;
}

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
  if (!os) throw Error("cannot write " + p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-9"};
  std::string out_dir = "acceptance_out";
  app.add_option("--out-dir", out_dir, "where the CSV evidence goes");
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  bool all = true;
  auto report = [&](int id, const std::string& title, const Verdict& v, double secs) {
    all = all && v.pass;
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(1);
    t << secs;
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << title << "  [" << v.detail << "] ("
              << t.str() << " s)" << std::endl;
  };
  auto timed = [](const std::function<Verdict()>& fn, double& secs) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return v;
  };

  double secs = 0;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> unseeded{
      {"field and linear algebra", field_suite},
      {"operator properties", operator_suite},
      {"absorber decomposition invariants", absorber_invariants}};
  for (std::size_t i = 0; i < unseeded.size(); ++i) {
    const Verdict v = timed(unseeded[i].second, secs);
    report(static_cast<int>(i) + 1, unseeded[i].first, v, secs);
  }

  std::string pipeline_info;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> seeded{
      {"absorber count oracle", absorber_count},
      {"nibble statistics", nibble_statistics},
      {"exact cover oracle", exact_cover},
      {"end-to-end pipeline", [&] { return pipeline_runs(pipeline_info); }},
      {"fractional decompositions", fractional_suite}};
  std::vector<std::string> first;
  for (std::size_t i = 0; i < seeded.size(); ++i) {
    const int id = static_cast<int>(i) + 4;
    const Verdict v = timed(seeded[i].second, secs);
    first.push_back(v.csv);
    write_file(dir / ("criterion" + std::to_string(id) + ".csv"), v.csv);
    report(id, seeded[i].first, v, secs);
    if (id == 7 && !pipeline_info.empty()) std::cout << "  info: " << pipeline_info << std::endl;
  }

  Verdict det;
  const auto start = std::chrono::steady_clock::now();
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < seeded.size(); ++i) {
    const int id = static_cast<int>(i) + 4;
    std::string again;
    try {
      again = seeded[i].second().csv;
    } catch (const std::exception& e) {
      require(det, false, std::string("rerun threw: ") + e.what());
      continue;
    }
    write_file(dir / ("criterion" + std::to_string(id) + "_rerun.csv"), again);
    require(det, again == first[i], "criterion " + std::to_string(id) + " CSV differs on rerun");
    bytes += again.size();
  }
  det.detail += "criteria 4-8 rerun, " + std::to_string(bytes) + " CSV bytes compared";
  report(9, "determinism", det, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? 0 : 1;
}
