#include "mrepath/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mrepath {

using json = nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_cindex_csv(std::ostream& os, const CrossvalResult& r) {
  os << "fold,split,cindex\n";
  for (const auto& f : r.folds) os << f.fold << ",val," << (f.skipped ? std::string("skipped") : num(f.cindex)) << '\n';
  os << "mean,val," << num(r.mean) << '\n';
  os << "std,val," << num(r.stddev) << '\n';
}

void write_loss_csv(std::ostream& os, const std::vector<FoldResult>& folds) {
  os << "fold,epoch,loss\n";
  for (const auto& f : folds)
    for (std::size_t e = 0; e < f.epoch_loss.size(); ++e) os << f.fold << ',' << e << ',' << num(f.epoch_loss[e]) << '\n';
}

void write_weights_csv(std::ostream& os, const std::vector<Prediction>& preds) {
  os << "fold,id,w_p,w_g,mono_p,mono_g,holo_p,holo_g\n";
  for (const auto& p : preds) {
    const auto& c = p.confidence;
    os << p.fold << ',' << p.id << ',' << num(c.w_p) << ',' << num(c.w_g) << ',' << num(c.mono_p) << ','
       << num(c.mono_g) << ',' << num(c.holo_p) << ',' << num(c.holo_g) << '\n';
  }
}

void write_predictions_csv(std::ostream& os, const std::vector<Prediction>& preds) {
  os << "fold,id,c,t,bin,risk\n";
  for (const auto& p : preds)
    os << p.fold << ',' << p.id << ',' << p.label.c << ',' << num(p.label.t) << ',' << p.label.bin << ','
       << num(p.risk) << '\n';
}

void write_attention_csvs(const std::filesystem::path& dir, const std::vector<Prediction>& preds) {
  std::filesystem::create_directories(dir);
  auto dump = [&](const std::string& id, const char* stage, const Matrix& m) {
    if (m.size() == 0) return;
    auto out = open_out(dir / ("attention_" + id + "_" + stage + ".csv"));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << num(m(r, c));
      out << '\n';
    }
  };
  for (const auto& p : preds) {
    dump(p.id, "sa", p.attention.self_genomic);
    dump(p.id, "pg", p.attention.pathology_to_genomic);
    dump(p.id, "gp", p.attention.genomic_to_pathology);
  }
}

void write_ablation_csv(std::ostream& os, const AblationResult& r) {
  const std::size_t n_folds = r.runs.empty() ? 0 : r.runs.front().folds.size();
  auto cell = [](const FoldResult& f) { return f.skipped ? std::string("skipped") : num(f.cindex); };
  if (r.axis == "k") {
    os << "split";
    for (const auto& s : r.settings) os << ',' << s.label;
    os << '\n';
    for (std::size_t f = 0; f < n_folds; ++f) {
      os << f;
      for (const auto& run : r.runs) os << ',' << cell(run.folds[f]);
      os << '\n';
    }
    os << "mean";
    for (const auto& run : r.runs) os << ',' << num(run.mean);
    os << "\nstd";
    for (const auto& run : r.runs) os << ',' << num(run.stddev);
    os << '\n';
    return;
  }
  os << "setting";
  for (std::size_t f = 0; f < n_folds; ++f) os << ",split" << f;
  os << ",mean,std\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    os << '"' << r.settings[i].label << '"';
    for (const auto& f : r.runs[i].folds) os << ',' << cell(f);
    os << ',' << num(r.runs[i].mean) << ',' << num(r.runs[i].stddev) << '\n';
  }
}

KmReport km_report(const std::string& name, const std::vector<Prediction>& preds) {
  KmReport km;
  km.name = name;
  if (preds.size() < 2) {
    km.notes.push_back("fewer than 2 subjects; KM omitted");
    return km;
  }
  Vector risks(static_cast<Eigen::Index>(preds.size()));
  for (std::size_t i = 0; i < preds.size(); ++i) risks(static_cast<Eigen::Index>(i)) = preds[i].risk;
  const RiskSplit split = median_split(risks);
  km.notes = split.warnings;
  std::vector<SurvLabel> low, high;
  for (int i : split.low) low.push_back(preds[i].label);
  for (int i : split.high) high.push_back(preds[i].label);
  km.has_low = !low.empty();
  km.has_high = !high.empty();
  if (km.has_low) km.low = kaplan_meier(low);
  if (km.has_high) km.high = kaplan_meier(high);
  if (km.has_low && km.has_high) {
    km.test = log_rank(high, low);
    for (const auto& w : km.test.warnings) km.notes.push_back(w);
  } else {
    km.notes.push_back("empty risk group; KM curve omitted and log-rank not computed");
  }
  return km;
}

void write_km_csv(std::ostream& os, const KmReport& km) {
  os << "time,survival,at_risk,group\n";
  auto rows = [&](const KmCurve& c, const char* group) {
    for (const auto& p : c.points) os << num(p.time) << ',' << num(p.survival) << ',' << p.at_risk << ',' << group << '\n';
  };
  if (km.has_high) rows(km.high, "high");
  if (km.has_low) rows(km.low, "low");
}

void write_km_svg(std::ostream& os, const KmReport& km) {
  constexpr double W = 640, H = 420, L = 60, R = 20, T = 40, B = 50;
  double t_max = 1.0;
  for (const auto* c : {&km.high, &km.low})
    for (const auto& p : c->points) t_max = std::max(t_max, p.time);
  auto x = [&](double t) { return L + (W - L - R) * t / t_max; };
  auto y = [&](double s) { return T + (H - T - B) * (1.0 - s); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << W - R << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L << "\" y2=\"" << y(1) << "\" stroke=\"black\"/>\n";
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
    os << "<text x=\"" << L - 8 << "\" y=\"" << y(s) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << num(s) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">time (max "
     << num(t_max) << ")</text>\n";
  auto curve = [&](const KmCurve& c, const char* color, const char* label, double ly) {
    std::ostringstream path;
    double prev_s = 1.0;
    path << "M" << num(x(0)) << "," << num(y(1));
    for (const auto& p : c.points) {
      path << " L" << num(x(p.time)) << "," << num(y(prev_s)) << " L" << num(x(p.time)) << "," << num(y(p.survival));
      prev_s = p.survival;
    }
    os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R - 120 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << color << "\">" << label
       << "</text>\n";
  };
  if (km.has_high) curve(km.high, "#c0392b", "high risk", T + 10);
  if (km.has_low) curve(km.low, "#2471a3", "low risk", T + 26);
  os << "<text x=\"" << L << "\" y=\"" << T - 14 << "\" font-size=\"13\">Kaplan-Meier (" << km.name
     << ")  log-rank p = " << num(km.test.p) << "</text>\n";
  os << "</svg>\n";
}

std::vector<KmReport> emit_plots(const std::filesystem::path& dir, const std::vector<Prediction>& preds) {
  std::filesystem::create_directories(dir);
  std::map<int, std::vector<Prediction>> by_fold;
  for (const auto& p : preds) by_fold[p.fold].push_back(p);
  std::vector<KmReport> reports;
  for (const auto& [fold, members] : by_fold) reports.push_back(km_report(std::to_string(fold), members));
  if (by_fold.size() > 1) reports.push_back(km_report("all", preds));

  auto lr = open_out(dir / "logrank.csv");
  lr << "fold,n_high,n_low,chi2,p,note\n";
  for (const auto& km : reports) {
    if (km.has_low || km.has_high) {
      auto csv = open_out(dir / ("km_" + km.name + ".csv"));
      write_km_csv(csv, km);
      auto svg = open_out(dir / ("km_" + km.name + ".svg"));
      write_km_svg(svg, km);
    }
    const int n_high = km.has_high ? km.high.points.front().at_risk : 0;
    const int n_low = km.has_low ? km.low.points.front().at_risk : 0;
    std::string note;
    for (const auto& n : km.notes) note += (note.empty() ? "" : "; ") + n;
    lr << km.name << ',' << n_high << ',' << n_low << ',' << num(km.test.chi2) << ',' << num(km.test.p) << ",\"" << note
       << "\"\n";
  }
  auto w = open_out(dir / "weights.csv");
  write_weights_csv(w, preds);
  return reports;
}

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw DataError("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

void save_record(const std::filesystem::path& path, const std::string& config, const std::vector<FoldResult>& folds,
                 const std::vector<Prediction>& preds) {
  json j;
  j["config"] = config;
  j["folds"] = json::array();
  for (const auto& f : folds)
    j["folds"].push_back({{"fold", f.fold}, {"n_train", f.n_train}, {"n_test", f.n_test}, {"skipped", f.skipped},
                          {"cindex", f.cindex}, {"epoch_loss", f.epoch_loss}});
  j["predictions"] = json::array();
  for (const auto& p : preds) {
    const auto& c = p.confidence;
    j["predictions"].push_back({{"fold", p.fold}, {"id", p.id}, {"c", p.label.c}, {"t", p.label.t},
                                {"bin", p.label.bin}, {"risk", p.risk}, {"hazards", matrix_json(p.hazards)},
                                {"w_p", c.w_p}, {"w_g", c.w_g}, {"mono_p", c.mono_p}, {"mono_g", c.mono_g},
                                {"holo_p", c.holo_p}, {"holo_g", c.holo_g}});
  }
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

std::vector<Prediction> load_record_predictions(const std::filesystem::path& path) {
  const json j = read_json(path);
  std::vector<Prediction> out;
  try {
    for (const auto& e : j.at("predictions")) {
      Prediction p;
      p.fold = e.at("fold").get<int>();
      p.id = e.at("id").get<std::string>();
      p.label.c = e.at("c").get<int>();
      p.label.t = e.at("t").get<double>();
      p.label.bin = e.at("bin").get<int>();
      p.risk = e.at("risk").get<double>();
      p.hazards = matrix_from_json(e.at("hazards"));
      p.confidence = {e.at("mono_p").get<double>(), e.at("mono_g").get<double>(), e.at("holo_p").get<double>(),
                      e.at("holo_g").get<double>(),  e.at("w_p").get<double>(),    e.at("w_g").get<double>()};
      out.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed record: " + e.what());
  }
  return out;
}

void save_model(const std::filesystem::path& path, const Model& model, const BinEdges& bins) {
  json j;
  j["config"] = to_text(model.config());
  j["dim"] = model.dim();
  j["gene_widths"] = model.genomics_spec().widths;
  j["bin_edges"] = bins.edges;
  j["params"] = json::array();
  for (const auto& name : model.params().names())
    j["params"].push_back({{"name", name}, {"value", matrix_json(model.params().value(name))}});
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

std::pair<Model, BinEdges> load_model(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    std::istringstream cfg_text(j.at("config").get<std::string>());
    const RunConfig cfg = parse_config(cfg_text);
    Model model(cfg, j.at("dim").get<Eigen::Index>(), j.at("gene_widths").get<std::vector<Eigen::Index>>());
    for (const auto& p : j.at("params")) model.params().add(p.at("name").get<std::string>(), matrix_from_json(p.at("value")));
    BinEdges bins;
    bins.edges = j.at("bin_edges").get<std::vector<double>>();
    return {std::move(model), bins};
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed model file: " + e.what());
  }
}

}  // namespace mrepath
