#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrepath/genomics.hpp"
#include "mrepath/hypergraph.hpp"
#include "mrepath/survival.hpp"

namespace mrepath {

struct Subject {
  std::string id;
  PatchSet patches;
  GeneGroups genes;
  SurvLabel label;
};

struct Cohort {
  std::vector<Subject> subjects;
  BinEdges bin_edges;       // over the whole cohort; training recomputes per fold
  std::string provenance;
  // Ground truth for synthetic cohorts only (empty after load_cohort).
  std::vector<int> latent_class;
  std::vector<double> latent_risk;

  std::size_t size() const { return subjects.size(); }
  Eigen::Index dim() const { return subjects.empty() ? 0 : subjects.front().patches.dim(); }
  std::vector<SurvLabel> labels() const;
  /// Throws DataError on duplicate ids, inconsistent dims or group widths, or negative times.
  void validate() const;
};

/// Binary patch file: u32 n, u32 d, then n rows of (x, y, f_1..f_d), all little-endian f32.
PatchSet read_patch_file(const std::filesystem::path& path);
void write_patch_file(const std::filesystem::path& path, const PatchSet& p);

/// Manifest CSV with header "id,patch_file,gene_file,c,t"; file paths are relative to the manifest.
Cohort load_cohort(const std::filesystem::path& manifest);

/// Writes <dir>/manifest.csv, <dir>/patches/<id>.bin and <dir>/genes/<id>.txt.
/// Returns the manifest path.
std::filesystem::path save_cohort(const Cohort& cohort, const std::filesystem::path& dir);

/// Default planted effect. Event log-rates differ by 15 per unit latent risk,
/// so synthetic times span many decades; only their order matters downstream.
inline constexpr double kStrongSignal = 3.0;

struct SynthSpec {
  std::uint64_t seed = 0;
  int subjects = 20;
  int patches = 64;
  int dim = 16;
  int bins = 4;
  double signal = kStrongSignal;  // 0 gives a null cohort
  double censor_fraction = 0.25;
  std::vector<int> gene_widths = {6, 5, 4, 6, 5, 6};
};

/// Two latent risk classes with a continuous severity inside each class.
/// Tumor patches form a contiguous grid region whose feature cluster shifts
/// with the latent risk; gene groups carry the same latent signal; event times
/// are exponential with log-rate proportional to the latent risk, and
/// censoring is independent exponential. Values are rounded to f32 so a saved
/// cohort reloads identically.
Cohort synth_cohort(const SynthSpec& spec);

}  // namespace mrepath
