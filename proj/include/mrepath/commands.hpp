#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrepath/cohort.hpp"
#include "mrepath/config.hpp"

// Subcommand bodies shared by the CLI and the tests. Each throws the typed
// errors from errors.hpp; exit_code_for maps them to process exit codes.

namespace mrepath {

struct SimulateOptions {
  std::uint64_t seed = 0;
  int subjects = 20;
  int patches = 64;
  int dim = 16;
  int bins = 4;
  double signal = kStrongSignal;
  double censor_fraction = 0.25;
  std::filesystem::path out;
};

/// Writes a synthetic cohort under out/ and returns the manifest path.
std::filesystem::path cmd_simulate(const SimulateOptions& o);

struct BuildGraphOptions {
  std::filesystem::path in;  // patch file
  int k = 9;
  std::string mode = "TF";   // T, F or TF
  std::filesystem::path out;
};

void cmd_build_graph(const BuildGraphOptions& o, std::ostream& log);

/// Config file (optional) followed by key=value overrides in order.
struct ConfigSource {
  std::filesystem::path file;
  std::vector<std::string> overrides;
};

RunConfig resolve_config(const ConfigSource& src);

struct TrainOptions {
  std::filesystem::path manifest;
  ConfigSource config;
  std::filesystem::path out;
};

void cmd_train(const TrainOptions& o, std::ostream& log);

struct EvalOptions {
  std::filesystem::path model;
  std::filesystem::path manifest;
  std::filesystem::path out;  // predictions CSV; stdout when empty
};

/// Returns the C-index (NaN when no pair is comparable).
double cmd_eval(const EvalOptions& o, std::ostream& log);

struct CrossvalOptions {
  std::filesystem::path manifest;
  ConfigSource config;
  std::filesystem::path out;
  bool dump_attention = false;
};

/// Returns the mean held-out C-index.
double cmd_crossval(const CrossvalOptions& o, std::ostream& log);

struct AblateOptions {
  std::string axis;
  std::filesystem::path manifest;
  ConfigSource config;
  std::filesystem::path out;
};

void cmd_ablate(const AblateOptions& o, std::ostream& log);

struct KmPlotOptions {
  std::filesystem::path record;
  std::filesystem::path out;  // defaults to the record's directory
};

void cmd_km_plot(const KmPlotOptions& o, std::ostream& log);

/// 2 config, 3 data, 4 numeric or shape, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace mrepath
