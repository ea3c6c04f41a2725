#include "mrepath/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mrepath {

GraphMode parse_graph_mode(const std::string& name) {
  if (name == "none") return GraphMode::None;
  if (name == "hgnn") return GraphMode::Hgnn;
  if (name == "sheaf_T") return GraphMode::SheafT;
  if (name == "sheaf_F") return GraphMode::SheafF;
  if (name == "sheaf_TF") return GraphMode::SheafTF;
  throw ConfigError("unknown graph_mode '" + name + "' (expected none, hgnn, sheaf_T, sheaf_F, sheaf_TF)");
}

std::string to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::None: return "none";
    case GraphMode::Hgnn: return "hgnn";
    case GraphMode::SheafT: return "sheaf_T";
    case GraphMode::SheafF: return "sheaf_F";
    case GraphMode::SheafTF: return "sheaf_TF";
  }
  return "none";
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

Weighting parse_weighting(const std::string& text) {
  Weighting w;
  if (text == "dynamic") return w;
  if (text.rfind("fixed:", 0) == 0) {
    const std::string rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw ConfigError("weighting: expected fixed:wp,wg");
    w.dynamic = false;
    w.w_p = parse_double("weighting", trim(rest.substr(0, comma)));
    w.w_g = parse_double("weighting", trim(rest.substr(comma + 1)));
    return w;
  }
  throw ConfigError("unknown weighting '" + text + "' (expected dynamic or fixed:wp,wg)");
}

std::string to_string(const Weighting& w) {
  if (w.dynamic) return "dynamic";
  return "fixed:" + fmt_double(w.w_p) + "," + fmt_double(w.w_g);
}

void RunConfig::validate() const {
  if (k < 0) throw ConfigError("k must be >= 0");
  if (stalk_dim < 1 || stalk_dim > 4) throw ConfigError("stalk_dim must be in [1, 4]");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (bins < 2) throw ConfigError("bins must be >= 2");
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (folds < 2) throw ConfigError("folds must be >= 2 (a held-out fold is required)");
  if (genomics_hidden < 0 || confidence_hidden < 0) throw ConfigError("hidden widths must be >= 0");
  if (!(head_init_std >= 0.0)) throw ConfigError("head_init_std must be >= 0");
  if (!weighting.dynamic) {
    if (!(weighting.w_p >= 0.0 && weighting.w_g >= 0.0) || std::abs(weighting.w_p + weighting.w_g - 1.0) > 1e-9)
      throw ConfigError("fixed weights must be nonnegative and sum to 1");
  }
}

void RunConfig::validate_for_dim(long dim) const {
  validate();
  if (dim % stalk_dim != 0)
    throw ConfigError("feature dim " + std::to_string(dim) + " is not divisible by stalk_dim " +
                      std::to_string(stalk_dim));
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError("seed must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "k") {
    k = static_cast<int>(parse_int(key, v));
  } else if (key == "stalk_dim") {
    stalk_dim = static_cast<int>(parse_int(key, v));
  } else if (key == "layers") {
    layers = static_cast<int>(parse_int(key, v));
  } else if (key == "bins") {
    bins = static_cast<int>(parse_int(key, v));
  } else if (key == "lr") {
    lr = parse_double(key, v);
  } else if (key == "weight_decay") {
    weight_decay = parse_double(key, v);
  } else if (key == "epochs") {
    epochs = static_cast<int>(parse_int(key, v));
  } else if (key == "folds") {
    folds = static_cast<int>(parse_int(key, v));
  } else if (key == "weighting") {
    weighting = parse_weighting(v);
  } else if (key == "fusion") {
    fusion = parse_fusion_mode(v);
  } else if (key == "graph_mode") {
    graph_mode = parse_graph_mode(v);
  } else if (key == "activation") {
    activation = parse_activation(v);
  } else if (key == "restriction") {
    if (v == "learned")
      identity_maps = false;
    else if (v == "identity")
      identity_maps = true;
    else
      throw ConfigError("restriction must be learned or identity");
  } else if (key == "genomics_hidden") {
    genomics_hidden = static_cast<int>(parse_int(key, v));
  } else if (key == "confidence_hidden") {
    confidence_hidden = static_cast<int>(parse_int(key, v));
  } else if (key == "head_init_std") {
    head_init_std = parse_double(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    c.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "seed=" << c.seed << '\n'
     << "k=" << c.k << '\n'
     << "stalk_dim=" << c.stalk_dim << '\n'
     << "layers=" << c.layers << '\n'
     << "bins=" << c.bins << '\n'
     << "lr=" << fmt_double(c.lr) << '\n'
     << "weight_decay=" << fmt_double(c.weight_decay) << '\n'
     << "epochs=" << c.epochs << '\n'
     << "folds=" << c.folds << '\n'
     << "weighting=" << to_string(c.weighting) << '\n'
     << "fusion=" << to_string(c.fusion) << '\n'
     << "graph_mode=" << to_string(c.graph_mode) << '\n'
     << "activation=" << to_string(c.activation) << '\n'
     << "restriction=" << (c.identity_maps ? "identity" : "learned") << '\n'
     << "genomics_hidden=" << c.genomics_hidden << '\n'
     << "confidence_hidden=" << c.confidence_hidden << '\n'
     << "head_init_std=" << fmt_double(c.head_init_std) << '\n';
  return os.str();
}

}  // namespace mrepath
