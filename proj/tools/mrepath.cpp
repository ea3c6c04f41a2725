#include <iostream>

#include <CLI11.hpp>

#include "mrepath/commands.hpp"
#include "mrepath/errors.hpp"

using namespace mrepath;

namespace {

void add_config_flags(CLI::App* sub, ConfigSource& src, std::string& weighting) {
  sub->add_option("--config", src.file, "flat key=value config file");
  sub->add_option("--set", src.overrides, "override one config key (key=value), repeatable");
  sub->add_option("--weighting", weighting, "dynamic or fixed:wp,wg");
}

void apply_weighting(ConfigSource& src, const std::string& weighting) {
  if (!weighting.empty()) src.overrides.push_back("weighting=" + weighting);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrepath: multimodal survival prediction with sheaf hypergraph convolution"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "write a synthetic planted-signal cohort");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--subjects", sim.subjects);
  simulate->add_option("--patches", sim.patches);
  simulate->add_option("--dim", sim.dim);
  simulate->add_option("--bins", sim.bins);
  simulate->add_option("--signal", sim.signal, "planted signal strength (default 3, strong); 0 gives a null cohort");
  simulate->add_option("--censor-fraction", sim.censor_fraction);
  simulate->add_option("--out", sim.out)->required();

  BuildGraphOptions bg;
  auto* build_graph = app.add_subcommand("build-graph", "build the hypergraph of one patch file");
  build_graph->add_option("--in", bg.in)->required();
  build_graph->add_option("--k", bg.k);
  build_graph->add_option("--mode", bg.mode, "T, F or TF");
  build_graph->add_option("--out", bg.out);

  TrainOptions tr;
  std::string tr_w;
  auto* train_cmd = app.add_subcommand("train", "train on a whole cohort");
  train_cmd->add_option("--manifest", tr.manifest)->required();
  train_cmd->add_option("--out", tr.out);
  add_config_flags(train_cmd, tr.config, tr_w);

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "evaluate a trained model");
  eval->add_option("--model", ev.model)->required();
  eval->add_option("--manifest", ev.manifest)->required();
  eval->add_option("--out", ev.out, "predictions CSV (stdout when omitted)");

  CrossvalOptions cv;
  std::string cv_w;
  auto* cross = app.add_subcommand("crossval", "stratified k-fold cross-validation");
  cross->add_option("--manifest", cv.manifest)->required();
  cross->add_option("--out", cv.out);
  cross->add_flag("--dump-attention", cv.dump_attention);
  add_config_flags(cross, cv.config, cv_w);

  AblateOptions ab;
  std::string ab_w;
  auto* abl = app.add_subcommand("ablate", "cross-validate every setting on one axis");
  abl->add_option("--axis", ab.axis, "k, graph_mode, weighting or fusion")->required();
  abl->add_option("--manifest", ab.manifest)->required();
  abl->add_option("--out", ab.out);
  add_config_flags(abl, ab.config, ab_w);

  KmPlotOptions km;
  auto* km_plot = app.add_subcommand("km-plot", "Kaplan-Meier curves and log-rank test from a run record");
  km_plot->add_option("--record", km.record)->required();
  km_plot->add_option("--out", km.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      std::cout << cmd_simulate(sim).string() << '\n';
    } else if (build_graph->parsed()) {
      cmd_build_graph(bg, std::cerr);
    } else if (train_cmd->parsed()) {
      apply_weighting(tr.config, tr_w);
      cmd_train(tr, std::cout);
    } else if (eval->parsed()) {
      cmd_eval(ev, std::cerr);
    } else if (cross->parsed()) {
      apply_weighting(cv.config, cv_w);
      cmd_crossval(cv, std::cout);
    } else if (abl->parsed()) {
      apply_weighting(ab.config, ab_w);
      cmd_ablate(ab, std::cout);
    } else if (km_plot->parsed()) {
      cmd_km_plot(km, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
