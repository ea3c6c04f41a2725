#include "mrepath/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace mrepath {

namespace {

std::vector<SurvLabel> labels_of(const Cohort& cohort, const std::vector<int>& idx) {
  std::vector<SurvLabel> out;
  for (int i : idx) out.push_back(cohort.subjects[i].label);
  return out;
}

double subject_loss(Model& model, const PreparedSubject& ps, const SurvLabel& label, bool with_grad) {
  Tape tape;
  const ForwardResult fw = model.forward(tape, ps);
  const Var loss = nll_loss(fw.hazards, {label});
  if (with_grad) tape.backward(loss);
  return loss.scalar();
}

}  // namespace

TrainResult train(const Cohort& cohort, const RunConfig& cfg, std::vector<int> train_idx) {
  cfg.validate_for_dim(static_cast<long>(cohort.dim()));
  if (cohort.subjects.empty()) throw DataError("train: empty cohort");
  if (train_idx.empty()) {
    train_idx.resize(cohort.size());
    std::iota(train_idx.begin(), train_idx.end(), 0);
  }
  const auto start = std::chrono::steady_clock::now();

  TrainResult out;
  std::vector<SurvLabel> labels = labels_of(cohort, train_idx);
  out.bins = make_bins(labels, cfg.bins);
  assign_bins(labels, out.bins);

  Rng rng(cfg.seed);
  Rng init_rng = rng.split(11);
  Rng order_rng = rng.split(12);
  out.model = Model::init(cfg, cohort.dim(), cohort.subjects.front().genes.widths(), init_rng);
  Model& model = out.model;

  std::vector<PreparedSubject> prepared;
  prepared.reserve(train_idx.size());
  for (int i : train_idx) prepared.push_back(prepare_subject(cohort.subjects[i], cfg));

  auto mean_loss = [&](const std::vector<double>& per_subject) {
    // summed in subject order so the value does not depend on the visit order
    double total = 0.0;
    for (double v : per_subject) total += v;
    return total / static_cast<double>(per_subject.size());
  };

  std::vector<double> losses(prepared.size());
  for (std::size_t j = 0; j < prepared.size(); ++j) losses[j] = subject_loss(model, prepared[j], labels[j], false);
  out.record.epoch_loss.push_back(mean_loss(losses));

  Adam opt(model.params(), cfg.lr, cfg.weight_decay);
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (std::size_t j : order) {
      model.params().zero_grad();
      const double loss = subject_loss(model, prepared[j], labels[j], true);
      if (!std::isfinite(loss) || !model.params().flat_grad().allFinite())
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", subject " +
                           cohort.subjects[train_idx[j]].id);
      losses[j] = loss;
      opt.step(model.params());
    }
    out.record.epoch_loss.push_back(mean_loss(losses));
  }

  out.record.training = evaluate(model, cohort, out.bins, train_idx);
  out.record.config = to_text(cfg);
  out.record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<Prediction> evaluate(Model& model, const Cohort& cohort, const BinEdges& bins,
                                 const std::vector<int>& idx, bool capture_attention) {
  std::vector<Prediction> out;
  out.reserve(idx.size());
  for (int i : idx) {
    const Subject& s = cohort.subjects[i];
    const PreparedSubject ps = prepare_subject(s, model.config());
    Tape tape;
    ForwardResult fw = model.forward(tape, ps, capture_attention);
    Prediction p;
    p.id = s.id;
    p.label = s.label;
    p.label.bin = bins.assign(s.label.t);
    p.hazards = fw.hazards.value();
    p.risk = risk_scores(p.hazards)(0);
    p.confidence = fw.confidence;
    if (capture_attention) p.attention = std::move(fw.attention);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<int> assign_folds(const std::vector<SurvLabel>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("crossval: folds must be >= 2");
  if (static_cast<int>(labels.size()) < folds)
    throw DataError("crossval: " + std::to_string(labels.size()) + " subjects for " + std::to_string(folds) + " folds");
  Rng rng = Rng(seed).split(21);
  std::vector<int> fold_of(labels.size(), -1);
  int next = 0;
  for (int status : {0, 1}) {
    std::vector<int> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i].c == status) members.push_back(static_cast<int>(i));
    rng.shuffle(members);
    for (int i : members) {
      fold_of[i] = next;
      next = (next + 1) % folds;
    }
  }
  return fold_of;
}

CrossvalResult crossval(const Cohort& cohort, const RunConfig& cfg, bool capture_attention) {
  cfg.validate_for_dim(static_cast<long>(cohort.dim()));
  CrossvalResult out;
  out.config = to_text(cfg);
  out.fold_of = assign_folds(cohort.labels(), cfg.folds, cfg.seed);
  std::vector<double> scores;
  for (int f = 0; f < cfg.folds; ++f) {
    std::vector<int> train_idx, test_idx;
    for (std::size_t i = 0; i < cohort.size(); ++i) (out.fold_of[i] == f ? test_idx : train_idx).push_back(static_cast<int>(i));
    RunConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f);
    TrainResult tr = train(cohort, fold_cfg, train_idx);
    auto preds = evaluate(tr.model, cohort, tr.bins, test_idx, capture_attention);

    FoldResult fr;
    fr.fold = f;
    fr.n_train = static_cast<int>(train_idx.size());
    fr.n_test = static_cast<int>(test_idx.size());
    fr.epoch_loss = tr.record.epoch_loss;
    fr.initial_loss = tr.record.epoch_loss.front();
    fr.final_loss = tr.record.epoch_loss.back();
    Vector risks(static_cast<Eigen::Index>(preds.size()));
    std::vector<SurvLabel> labels;
    for (std::size_t j = 0; j < preds.size(); ++j) {
      preds[j].fold = f;
      risks(static_cast<Eigen::Index>(j)) = preds[j].risk;
      labels.push_back(preds[j].label);
    }
    try {
      fr.cindex = c_index(risks, labels);
      scores.push_back(fr.cindex);
    } catch (const NumericError&) {
      fr.skipped = true;
      out.warnings.push_back("fold " + std::to_string(f) + " skipped: no comparable pairs");
    }
    out.folds.push_back(std::move(fr));
    for (auto& p : preds) out.predictions.push_back(std::move(p));
  }
  if (scores.empty()) throw NumericError("crossval: every fold lacked comparable pairs");
  out.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  double ss = 0.0;
  for (double s : scores) ss += (s - out.mean) * (s - out.mean);
  out.stddev = scores.size() > 1 ? std::sqrt(ss / static_cast<double>(scores.size() - 1)) : 0.0;
  return out;
}

std::vector<AblationSetting> ablation_settings(const std::string& axis, const RunConfig& base) {
  std::vector<AblationSetting> out;
  auto with = [&](const std::string& label, auto mutate) {
    RunConfig c = base;
    mutate(c);
    out.push_back({label, c});
  };
  if (axis == "k") {
    for (int k : {0, 4, 9, 24, 48}) with("k=" + std::to_string(k), [k](RunConfig& c) { c.k = k; });
  } else if (axis == "graph_mode") {
    for (auto m : {GraphMode::None, GraphMode::Hgnn, GraphMode::SheafT, GraphMode::SheafF, GraphMode::SheafTF})
      with(to_string(m), [m](RunConfig& c) { c.graph_mode = m; });
  } else if (axis == "weighting") {
    for (auto [wp, wg] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.7, 0.3}, {0.3, 0.7}, {0.95, 0.05}, {0.05, 0.95}}) {
      Weighting w{false, wp, wg};
      with(to_string(w), [w](RunConfig& c) { c.weighting = w; });
    }
    with("dynamic", [](RunConfig& c) { c.weighting = Weighting{}; });
  } else if (axis == "fusion") {
    for (auto m : {FusionMode::Ifa, FusionMode::PgGp, FusionMode::SaPg, FusionMode::SaGp})
      with(to_string(m), [m](RunConfig& c) { c.fusion = m; });
  } else {
    throw ConfigError("unknown ablation axis '" + axis + "' (expected k, graph_mode, weighting, fusion)");
  }
  return out;
}

AblationResult ablate(const Cohort& cohort, const RunConfig& base, const std::string& axis) {
  AblationResult out;
  out.axis = axis;
  out.settings = ablation_settings(axis, base);
  for (const auto& s : out.settings) out.runs.push_back(crossval(cohort, s.config));
  return out;
}

}  // namespace mrepath
