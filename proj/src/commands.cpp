#include "mrepath/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "mrepath/errors.hpp"
#include "mrepath/reports.hpp"

namespace mrepath {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_lock(const fs::path& dir, const RunConfig& cfg) {
  fs::create_directories(dir);
  auto out = open_out(dir / "config.lock");
  out << to_text(cfg);
}

fs::path default_out(const fs::path& given, const char* name) { return given.empty() ? fs::path("runs") / name : given; }

}  // namespace

fs::path cmd_simulate(const SimulateOptions& o) {
  if (o.out.empty()) throw ConfigError("simulate: --out is required");
  SynthSpec spec;
  spec.seed = o.seed;
  spec.subjects = o.subjects;
  spec.patches = o.patches;
  spec.dim = o.dim;
  spec.bins = o.bins;
  spec.signal = o.signal;
  spec.censor_fraction = o.censor_fraction;
  return save_cohort(synth_cohort(spec), o.out);
}

void cmd_build_graph(const BuildGraphOptions& o, std::ostream& log) {
  if (o.mode != "T" && o.mode != "F" && o.mode != "TF") throw ConfigError("build-graph: --mode must be T, F or TF");
  if (o.k < 0) throw ConfigError("build-graph: k must be >= 0");
  const PatchSet p = read_patch_file(o.in);
  Hypergraph h;
  std::vector<std::string> warnings;
  if (o.mode == "T") {
    auto e = build_topo_edges(p, o.k);
    warnings = e.warnings;
    h = make_hypergraph(e, EdgeKind::Topological);
  } else if (o.mode == "F") {
    auto e = build_feat_edges(p, o.k);
    warnings = e.warnings;
    h = make_hypergraph(e, EdgeKind::Feature);
  } else {
    auto et = build_topo_edges(p, o.k);
    auto ef = build_feat_edges(p, o.k);
    warnings = et.warnings;
    h = union_edges(et, ef);
  }
  for (const auto& w : warnings) log << "warning: " << w << '\n';
  if (o.out.empty()) {
    write_hypergraph(std::cout, h);
    return;
  }
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  auto out = open_out(o.out);
  write_hypergraph(out, h);
  log << "wrote " << h.edges.size() << " hyperedges over " << h.n_vertices << " vertices to " << o.out.string() << '\n';
}

RunConfig resolve_config(const ConfigSource& src) {
  RunConfig cfg = src.file.empty() ? RunConfig{} : load_config(src.file);
  for (const auto& kv : src.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void cmd_train(const TrainOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_config(o.config);
  const Cohort cohort = load_cohort(o.manifest);
  cfg.validate_for_dim(cohort.dim());
  const fs::path dir = default_out(o.out, "train");
  write_lock(dir, cfg);

  TrainResult r = train(cohort, cfg);
  save_model(dir / "model.json", r.model, r.bins);
  FoldResult f;
  f.fold = -1;
  f.n_train = static_cast<int>(cohort.size());
  f.epoch_loss = r.record.epoch_loss;
  f.initial_loss = f.epoch_loss.front();
  f.final_loss = f.epoch_loss.back();
  save_record(dir / "record.json", r.record.config, {f}, r.record.training);
  {
    auto out = open_out(dir / "loss.csv");
    write_loss_csv(out, {f});
  }
  {
    auto out = open_out(dir / "weights.csv");
    write_weights_csv(out, r.record.training);
  }
  log << "trained " << cfg.epochs << " epochs on " << cohort.size() << " subjects; loss " << f.initial_loss << " -> "
      << f.final_loss << " (" << std::fixed << std::setprecision(2) << r.record.wall_seconds << " s)\n";
  log.unsetf(std::ios::fixed);
}

double cmd_eval(const EvalOptions& o, std::ostream& log) {
  auto [model, bins] = load_model(o.model);
  const Cohort cohort = load_cohort(o.manifest);
  if (cohort.dim() != model.dim()) throw DataError("cohort feature dim does not match the model");
  std::vector<int> idx(cohort.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  const auto preds = evaluate(model, cohort, bins, idx);
  if (o.out.empty()) {
    write_predictions_csv(std::cout, preds);
  } else {
    auto out = open_out(o.out);
    write_predictions_csv(out, preds);
  }
  std::vector<SurvLabel> labels;
  Vector risks(static_cast<Eigen::Index>(preds.size()));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    labels.push_back(preds[i].label);
    risks(static_cast<Eigen::Index>(i)) = preds[i].risk;
  }
  try {
    const double c = c_index(risks, labels);
    log << "c-index " << c << " over " << preds.size() << " subjects\n";
    return c;
  } catch (const NumericError&) {
    log << "warning: no comparable pairs; c-index undefined\n";
    return std::numeric_limits<double>::quiet_NaN();
  }
}

double cmd_crossval(const CrossvalOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_config(o.config);
  const Cohort cohort = load_cohort(o.manifest);
  cfg.validate_for_dim(cohort.dim());
  const fs::path dir = default_out(o.out, "crossval");
  write_lock(dir, cfg);

  const CrossvalResult r = crossval(cohort, cfg, o.dump_attention);
  for (const auto& w : r.warnings) log << "warning: " << w << '\n';
  {
    auto out = open_out(dir / "cindex.csv");
    write_cindex_csv(out, r);
  }
  {
    auto out = open_out(dir / "loss.csv");
    write_loss_csv(out, r.folds);
  }
  {
    auto out = open_out(dir / "predictions.csv");
    write_predictions_csv(out, r.predictions);
  }
  save_record(dir / "record.json", r.config, r.folds, r.predictions);
  const auto km = emit_plots(dir, r.predictions);
  if (o.dump_attention) write_attention_csvs(dir / "attention", r.predictions);

  for (const auto& f : r.folds) {
    log << "fold " << f.fold << ": ";
    if (f.skipped)
      log << "skipped";
    else
      log << "c-index " << f.cindex;
    log << "  loss " << f.initial_loss << " -> " << f.final_loss << '\n';
  }
  log << "mean c-index " << r.mean << " +/- " << r.stddev << '\n';
  for (const auto& k : km)
    if (k.name == "all") log << "pooled log-rank p " << k.test.p << '\n';
  return r.mean;
}

void cmd_ablate(const AblateOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_config(o.config);
  const Cohort cohort = load_cohort(o.manifest);
  cfg.validate_for_dim(cohort.dim());
  const auto settings = ablation_settings(o.axis, cfg);  // rejects unknown axes before any output
  (void)settings;
  const fs::path dir = default_out(o.out, "ablate");
  write_lock(dir, cfg);

  const AblationResult r = ablate(cohort, cfg, o.axis);
  auto out = open_out(dir / ("ablation_" + o.axis + ".csv"));
  write_ablation_csv(out, r);
  for (std::size_t i = 0; i < r.runs.size(); ++i)
    log << r.settings[i].label << ": mean c-index " << r.runs[i].mean << " +/- " << r.runs[i].stddev << '\n';
}

void cmd_km_plot(const KmPlotOptions& o, std::ostream& log) {
  const auto preds = load_record_predictions(o.record);
  const fs::path dir = o.out.empty() ? o.record.parent_path() : o.out;
  const auto reports = emit_plots(dir.empty() ? fs::path(".") : dir, preds);
  for (const auto& k : reports) {
    log << "km " << k.name << ": log-rank p " << k.test.p;
    for (const auto& n : k.notes) log << " [" << n << "]";
    log << '\n';
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const ShapeError*>(&e)) return 4;
  return 1;
}

}  // namespace mrepath
