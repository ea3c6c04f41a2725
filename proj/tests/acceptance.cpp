// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance [output-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mrepath/commands.hpp"
#include "mrepath/grad_check.hpp"
#include "mrepath/ops.hpp"
#include "mrepath/reports.hpp"
#include "mrepath/training.hpp"

using namespace mrepath;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof(timing), "%.2fs/%gs", secs, limit_s);
  std::cout << (pass ? "PASS " : "FAIL ") << id << " " << name << " [" << timing << "] " << o.detail
            << (in_time ? "" : " (over time limit)") << std::endl;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

PatchSet grid_patches(int n, int d, Rng& rng) {
  PatchSet p;
  const int side = static_cast<int>(std::ceil(std::sqrt(double(n))));
  p.coords.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    p.coords(i, 0) = i % side;
    p.coords(i, 1) = i / side;
  }
  p.feats = rng.normal_matrix(n, d, 1.0);
  return p;
}

Hypergraph random_hypergraph(Rng& rng) {
  const int n = 2 + static_cast<int>(rng.below(29));  // n <= 30
  const PatchSet p = grid_patches(n, 4, rng);
  const int k = 1 + static_cast<int>(rng.below(std::min(n - 1, 10)));
  return union_edges(build_topo_edges(p, k), build_feat_edges(p, k));
}

// ---- 1, 2 ----

Outcome sheaf_reduction() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto h = random_hypergraph(rng);
    const Matrix diff = sheaf_laplacian(h, identity_sheaf(h, 1)).matrix - hgnn_operator(h).matrix;
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max |sheaf - hgnn| = " + num(worst) + " over 10 graphs (tol 1e-9)"};
}

Outcome spectral_bound() {
  double lo = 1.0, hi = 0.0, asym = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const Matrix M = hgnn_operator(random_hypergraph(rng)).matrix;
    asym = std::max(asym, (M - M.transpose()).cwiseAbs().maxCoeff());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues();
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  }
  const bool ok = lo >= -1e-9 && hi <= 1.0 + 1e-9 && asym <= 1e-9;
  return {ok, "eigenvalues in [" + num(lo) + ", " + num(hi) + "], max asymmetry " + num(asym) + " over 10 seeds"};
}

// ---- 3 ----

GradCheckReport sheaf_layer_grad(int seed) {
  Rng rng(static_cast<std::uint64_t>(seed));
  const int d = 4, bins = 3;
  const auto p = grid_patches(6, d, rng);
  const auto h = union_edges(build_topo_edges(p, 2), build_feat_edges(p, 2));
  const Matrix z = restriction_inputs(h, p);
  ParamStore ps;
  init_sheaf_params(ps, "g", d, 1, 0.4, rng);
  ps.add("theta", Matrix::Identity(d, d) + rng.normal_matrix(d, d, 0.3));
  ps.add("head.W", rng.normal_matrix(d, bins, 0.5));
  ps.add("head.b", rng.normal_matrix(1, bins, 0.1));
  const std::vector<SurvLabel> label{{seed % 2, 1.0, 1}};
  LossFn f = [&](ParamStore& st) {
    Tape t;
    const Var maps = restriction_maps(t, z, t.param(st, "g.W"), t.param(st, "g.b"));
    const Var op = sheaf_operator(t, h, maps, 1);
    const Var x = sheaf_layer(t.constant(p.feats), op, t.param(st, "theta"), Activation::ELU, 1);
    const Var hz = sigmoid(add_row(matmul(row_mean(x), t.param(st, "head.W")), t.param(st, "head.b")));
    const Var loss = nll_loss(hz, label);
    t.backward(loss);
    return loss.scalar();
  };
  return grad_check(f, ps, 1e-4, 1e-3);
}

GradCheckReport rebalance_grad(int seed) {
  Rng rng(static_cast<std::uint64_t>(seed));
  const Eigen::Index d = 4;
  ParamStore ps;
  init_confidence_params(ps, "conf.p", d, 3, rng);
  init_confidence_params(ps, "conf.g", d, 3, rng);
  ps.add("P", rng.normal_matrix(6, d, 1.0));
  ps.add("G", rng.normal_matrix(3, d, 1.0));
  const Matrix tp = rng.normal_matrix(6, d, 1.0), tg = rng.normal_matrix(3, d, 1.0);
  LossFn f = [&](ParamStore& p) {
    Tape t;
    const auto [pw, gw] = rebalance(t.param(p, "P"), t.param(p, "G"), p, "conf");
    const Var loss = sum(hadamard(pw, t.constant(tp))) + sum(hadamard(gw, t.constant(tg)));
    t.backward(loss);
    return loss.scalar();
  };
  return grad_check(f, ps, 1e-4, 1e-3);
}

GradCheckReport pipeline_grad(int seed) {
  SynthSpec spec;
  spec.seed = static_cast<std::uint64_t>(seed);
  spec.subjects = 4;
  spec.patches = 12;
  spec.dim = 4;
  spec.gene_widths = {3, 2, 4};
  const Cohort c = synth_cohort(spec);
  RunConfig cfg;
  cfg.k = 3;
  cfg.head_init_std = 0.3;
  Rng rng(static_cast<std::uint64_t>(seed));
  Model model = Model::init(cfg, c.dim(), c.subjects.front().genes.widths(), rng);
  auto labels = c.labels();
  assign_bins(labels, make_bins(labels, cfg.bins));
  const std::vector<PreparedSubject> prepared{prepare_subject(c.subjects[0], cfg), prepare_subject(c.subjects[1], cfg)};
  const std::vector<SurvLabel> two{labels[0], labels[1]};
  LossFn f = [&](ParamStore&) {
    Tape t;
    const Var h = concat_rows({model.forward(t, prepared[0]).hazards, model.forward(t, prepared[1]).hazards});
    const Var loss = nll_loss(h, two);
    t.backward(loss);
    return loss.scalar();
  };
  return grad_check(f, model.params(), 1e-4, 1e-3);
}

Outcome gradient_suite() {
  Outcome o;
  const std::pair<const char*, GradCheckReport (*)(int)> parts[] = {
      {"sheaf+nll", sheaf_layer_grad}, {"rebalance", rebalance_grad}, {"pipeline", pipeline_grad}};
  for (const auto& [name, fn] : parts) {
    double worst = 0.0;
    for (int seed = 0; seed < 3; ++seed) {
      const auto r = fn(seed);
      worst = std::max(worst, r.max_rel_err);
      if (!r.passed) {
        o.pass = false;
        o.detail += std::string(name) + " seed " + std::to_string(seed) + ": " + r.message + "; ";
      }
    }
    o.detail += std::string(name) + " max rel " + num(worst) + "; ";
  }
  o.detail += "(eps 1e-4, tol 1e-3, 3 seeds each)";
  return o;
}

// ---- 4 ----

Outcome weighting_invariants() {
  Rng rng(4);
  double worst_holo = 0.0, worst_w = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double mp = rng.uniform(kConfidenceEps, 1.0 - kConfidenceEps);
    const double mg = rng.uniform(kConfidenceEps, 1.0 - kConfidenceEps);
    const auto [hp, hg] = holo_confidence(mp, mg);
    const auto [wp, wg] = dynamic_weights(mp, mg, hp, hg);
    worst_holo = std::max(worst_holo, std::abs(hp + hg - 1.0));
    worst_w = std::max(worst_w, std::abs(wp + wg - 1.0));
  }
  const auto [hp, hg] = holo_confidence(0.5, 0.5);
  const auto [wp, wg] = dynamic_weights(0.5, 0.5, hp, hg);
  const bool exact = hp == 0.5 && hg == 0.5 && wp == 0.5 && wg == 0.5;
  return {worst_holo <= 1e-9 && worst_w <= 1e-9 && exact,
          "max |holo sum - 1| " + num(worst_holo) + ", max |w sum - 1| " + num(worst_w) +
              ", symmetric case " + (exact ? "exactly (0.5, 0.5)" : "NOT exact")};
}

// ---- 5 ----

double brute_c_index(const Vector& r, const std::vector<SurvLabel>& l) {
  double num_ = 0.0, den = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) {
      if (i == j || l[i].c != 0 || !(l[i].t < l[j].t)) continue;
      den += 1.0;
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      num_ += r(a) > r(b) ? 1.0 : (r(a) == r(b) ? 0.5 : 0.0);
    }
  return num_ / den;
}

Outcome c_index_oracle() {
  int mismatches = 0, cohorts = 0;
  for (std::uint64_t seed = 0; cohorts < 100; ++seed) {
    Rng rng(seed + 500);
    const int n = 2 + static_cast<int>(rng.below(39));  // n <= 40
    std::vector<SurvLabel> l(n);
    Vector r(n);
    for (int i = 0; i < n; ++i) {
      l[i].c = rng.uniform() < 0.3 ? 1 : 0;
      l[i].t = static_cast<double>(1 + rng.below(20));  // integer times so ties occur
      r(i) = static_cast<double>(rng.below(10));        // and risk ties too
    }
    bool comparable = false;
    for (int i = 0; i < n && !comparable; ++i)
      for (int j = 0; j < n; ++j)
        if (l[i].c == 0 && l[i].t < l[j].t) comparable = true;
    if (!comparable) continue;
    ++cohorts;
    if (c_index(r, l) != brute_c_index(r, l)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " exact mismatches over 100 cohorts (n <= 40, 30% censoring)"};
}

// ---- 6 ----

Outcome km_log_rank() {
  Outcome o;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) {
      o.pass = false;
      o.detail += "failed: " + what + "; ";
    }
  };
  const auto a = kaplan_meier({{0, 1, 0}, {0, 2, 0}, {0, 3, 0}});
  check(std::abs(a.survival_at(1) - 2.0 / 3) < 1e-12 && std::abs(a.survival_at(2) - 1.0 / 3) < 1e-12 &&
            a.survival_at(3) == 0.0,
        "{1,2,3} uncensored");
  const auto b = kaplan_meier({{1, 1, 0}, {0, 2, 0}, {1, 3, 0}});
  check(b.survival_at(1) == 1.0 && std::abs(b.survival_at(2) - 0.5) < 1e-12 && std::abs(b.survival_at(3) - 0.5) < 1e-12,
        "{1+,2,3+}");
  const auto c = kaplan_meier({{1, 1, 0}, {1, 2, 0}, {1, 3, 0}});
  check(c.survival_at(5) == 1.0, "all censored");

  const std::vector<SurvLabel> g{{0, 1, 0}, {1, 2, 0}, {0, 3, 0}, {0, 5, 0}, {1, 6, 0}};
  const auto dup = log_rank(g, g);
  check(dup.p > 0.9, "duplicated groups");
  std::vector<SurvLabel> early, late;
  for (int i = 0; i < 8; ++i) {
    early.push_back({0, 1.0 + i, 0});
    late.push_back({0, 9.0 + i, 0});
  }
  const auto sep = log_rank(early, late);
  check(sep.p < 0.05, "separated 8v8");
  o.detail += "KM fixtures 3/3, duplicated p " + num(dup.p) + " (chi2 " + num(dup.chi2) + "), separated 8v8 p " +
              num(sep.p);
  return o;
}

// ---- 7 ----

Outcome nll_behavior() {
  const double e = kHazardEps;
  Matrix h1(1, 4);
  h1 << e, e, 1 - e, 0.3;
  const double uncens = nll_loss(h1, {{0, 5.0, 2}});
  const Matrix h2 = Matrix::Constant(1, 4, e);
  const double cens = nll_loss(h2, {{1, 5.0, 3}});

  Rng rng(7);
  const int n = 12, bins = 4;
  Matrix h = (rng.normal_matrix(n, bins, 1.0).array().tanh() * 0.45 + 0.5).matrix();
  std::vector<SurvLabel> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = {rng.uniform() < 0.3 ? 1 : 0, 1.0 + i, static_cast<int>(rng.below(bins))};
  const double base = nll_loss(h, labels);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Matrix hp(n, bins);
    std::vector<SurvLabel> lp(n);
    for (int i = 0; i < n; ++i) {
      hp.row(i) = h.row(perm[i]);
      lp[i] = labels[perm[i]];
    }
    worst = std::max(worst, std::abs(nll_loss(hp, lp) - base));
  }
  return {uncens < 1e-3 && cens < 1e-3 && worst <= 1e-12,
          "perfect uncensored " + num(uncens) + ", perfect censored " + num(cens) + ", permutation drift " + num(worst) +
              " over 10 shuffles"};
}

// ---- 8, 11 ----

fs::path simulate_into(const fs::path& dir, std::uint64_t seed, double signal) {
  SimulateOptions s;
  s.seed = seed;
  s.subjects = 20;
  s.patches = 64;
  s.dim = 16;
  s.signal = signal;
  s.out = dir;
  return cmd_simulate(s);
}

RunConfig planted_config(std::uint64_t seed) {
  RunConfig cfg;  // defaults: sheaf_TF, dynamic weighting, full interactive fusion
  cfg.seed = seed;
  cfg.graph_mode = GraphMode::SheafTF;
  cfg.weighting = parse_weighting("dynamic");
  cfg.fusion = FusionMode::Ifa;
  return cfg;
}

Outcome end_to_end(const fs::path& out) {
  Outcome o;
  double total = 0.0;
  bool descent = true;
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto manifest = simulate_into(out / ("ac8_cohort_" + std::to_string(seed)), seed, kStrongSignal);
    const auto r = crossval(load_cohort(manifest), planted_config(seed));
    for (const auto& f : r.folds) descent = descent && f.final_loss < f.initial_loss;
    total += r.mean;
    o.detail += "seed " + std::to_string(seed) + " C " + num(r.mean) + "; ";
  }
  const double mean = total / 3.0;
  o.pass = mean >= 0.85 && descent;
  o.detail += "mean " + num(mean) + " (need >= 0.85), loss decreased in every fold: " + (descent ? "yes" : "no");
  return o;
}

Outcome null_model(const fs::path& out) {
  double total = 0.0;
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto manifest = simulate_into(out / ("ac9_cohort_" + std::to_string(seed)), seed, 0.0);
    const double m = crossval(load_cohort(manifest), planted_config(seed)).mean;
    total += m;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  const double mean = total / 10.0;
  return {std::abs(mean - 0.5) <= 0.08,
          "mean over 10 seeds " + num(mean) + " (need 0.5 +/- 0.08); per-seed range [" + num(lo) + ", " + num(hi) + "]"};
}

Outcome ablation_direction(const fs::path& out) {
  const Cohort c = load_cohort(simulate_into(out / "ac10_cohort", 0, kStrongSignal));
  const RunConfig base = planted_config(0);
  auto mean_of = [](const AblationResult& r, const std::string& label) {
    for (std::size_t i = 0; i < r.settings.size(); ++i)
      if (r.settings[i].label == label) return r.runs[i].mean;
    throw ConfigError("ablation label not found: " + label);
  };
  const auto graph = ablate(c, base, "graph_mode");
  const auto k = ablate(c, base, "k");
  for (const auto* r : {&graph, &k}) {
    std::ofstream os(out / ("ablation_" + r->axis + ".csv"));
    write_ablation_csv(os, *r);
  }
  const double sheaf = mean_of(graph, "sheaf_TF"), none = mean_of(graph, "none");
  const double k9 = mean_of(k, "k=9"), k0 = mean_of(k, "k=0");
  return {sheaf >= none && k9 >= k0, "sheaf_TF " + num(sheaf) + " vs none " + num(none) + "; k=9 " + num(k9) +
                                         " vs k=0 " + num(k0) + "; paired CSVs in " + out.string()};
}

std::vector<std::pair<fs::path, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back({fs::relative(e.path(), root), ss.str()});
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism(const fs::path& out) {
  for (const char* run : {"ac11_a", "ac11_b"}) {
    const fs::path dir = out / run;
    fs::remove_all(dir);
    const auto manifest = simulate_into(dir / "cohort", 0, kStrongSignal);
    CrossvalOptions o;
    o.manifest = manifest;
    o.config.overrides = {"seed=0", "graph_mode=sheaf_TF", "weighting=dynamic", "fusion=IFA"};
    o.out = dir / "run";
    o.dump_attention = true;
    std::ostringstream log;
    cmd_crossval(o, log);
  }
  const auto a = tree(out / "ac11_a"), b = tree(out / "ac11_b");
  if (a.size() != b.size()) return {false, "file counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first) return {false, "file sets differ at " + a[i].first.string()};
    if (a[i].second != b[i].second) return {false, "contents differ: " + a[i].first.string()};
  }
  return {true, std::to_string(a.size()) + " files identical byte-for-byte (cohort and crossval outputs)"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);

  criterion("AC1", "sheaf reduction to HGNN", 5, sheaf_reduction);
  criterion("AC2", "HGNN spectral bound", 5, spectral_bound);
  criterion("AC3", "gradient suite", 60, gradient_suite);
  criterion("AC4", "weighting invariants", 1, weighting_invariants);
  criterion("AC5", "C-index oracle", 10, c_index_oracle);
  criterion("AC6", "KM and log-rank", 1, km_log_rank);
  criterion("AC7", "NLL behavior", 1, nll_behavior);
  criterion("AC8", "planted-signal crossval", 600, [&] { return end_to_end(out); });
  criterion("AC9", "null model", 600, [&] { return null_model(out); });
  criterion("AC10", "ablation direction", 1800, [&] { return ablation_direction(out); });
  criterion("AC11", "determinism", 600, [&] { return determinism(out); });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
