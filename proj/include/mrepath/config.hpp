#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "mrepath/activation.hpp"
#include "mrepath/fusion.hpp"

namespace mrepath {

enum class GraphMode { None, Hgnn, SheafT, SheafF, SheafTF };

GraphMode parse_graph_mode(const std::string& name);
std::string to_string(GraphMode mode);

struct Weighting {
  bool dynamic = true;
  double w_p = 0.5;
  double w_g = 0.5;
};

/// "dynamic" or "fixed:wp,wg".
Weighting parse_weighting(const std::string& text);
std::string to_string(const Weighting& w);

/// Run hyperparameters. Defaults follow the reference training setup
/// (Adam, lr 1e-4, weight decay 1e-5, 30 epochs, k = 9).
struct RunConfig {
  std::uint64_t seed = 0;
  int k = 9;
  int stalk_dim = 1;
  int layers = 2;
  int bins = 4;
  double lr = 1e-4;
  double weight_decay = 1e-5;
  int epochs = 30;
  int folds = 5;
  Weighting weighting;
  FusionMode fusion = FusionMode::Ifa;
  GraphMode graph_mode = GraphMode::SheafTF;
  Activation activation = Activation::ELU;
  bool identity_maps = false;  // key "restriction": learned | identity
  int genomics_hidden = 0;     // 0: use the feature dim
  int confidence_hidden = 0;   // 0: use the feature dim
  double head_init_std = 1e-3;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  /// Additional checks once the feature dim is known.
  void validate_for_dim(long dim) const;

  /// Sets one field from its text key; throws ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
};

/// Flat "key = value" lines; '#' comments and blank lines ignored.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form (every key, fixed order). parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& c);

}  // namespace mrepath
