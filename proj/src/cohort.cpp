#include "mrepath/cohort.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "mrepath/rng.hpp"

namespace mrepath {

static_assert(std::endian::native == std::endian::little, "patch files assume a little-endian host");

std::vector<SurvLabel> Cohort::labels() const {
  std::vector<SurvLabel> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) out.push_back(s.label);
  return out;
}

void Cohort::validate() const {
  std::set<std::string> ids;
  for (const auto& s : subjects) {
    if (!ids.insert(s.id).second) throw DataError("cohort: duplicate subject id '" + s.id + "'");
    if (!(s.label.t >= 0.0)) throw DataError("subject " + s.id + ": negative or invalid time");
    if (s.label.c != 0 && s.label.c != 1) throw DataError("subject " + s.id + ": censorship must be 0 or 1");
    try {
      s.patches.validate();
      s.genes.validate();
    } catch (const DataError& e) {
      throw DataError("subject " + s.id + ": " + e.what());
    }
    if (s.patches.dim() != dim())
      throw DataError("subject " + s.id + ": feature dim " + std::to_string(s.patches.dim()) + " differs from " +
                      std::to_string(dim()));
    if (s.genes.widths() != subjects.front().genes.widths() || s.genes.names != subjects.front().genes.names)
      throw DataError("subject " + s.id + ": gene groups differ from the first subject");
  }
}

PatchSet read_patch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open patch file " + path.string());
  std::uint32_t header[2] = {0, 0};
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header)))
    throw DataError("patch file " + path.string() + ": truncated header");
  const std::uint32_t n = header[0], d = header[1];
  if (d == 0) throw DataError("patch file " + path.string() + ": feature dim is zero");
  const std::size_t count = static_cast<std::size_t>(n) * (d + 2);
  // check the body length before allocating, so a garbage header cannot request gigabytes
  const auto body = std::filesystem::file_size(path) - sizeof(header);
  if (body != count * sizeof(float))
    throw DataError("patch file " + path.string() + ": body is " + std::to_string(body) + " bytes, header implies " +
                    std::to_string(count * sizeof(float)) + " (" + std::to_string(n) + " rows of " +
                    std::to_string(d + 2) + " floats)");
  std::vector<float> buf(count);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(float))))
    throw DataError("patch file " + path.string() + ": truncated body (expected " + std::to_string(n) +
                    " rows of " + std::to_string(d + 2) + " floats)");
  if (in.peek() != std::char_traits<char>::eof())
    throw DataError("patch file " + path.string() + ": trailing bytes after body");
  PatchSet p;
  p.coords.resize(n, 2);
  p.feats.resize(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    const float* row = buf.data() + static_cast<std::size_t>(i) * (d + 2);
    p.coords(i, 0) = row[0];
    p.coords(i, 1) = row[1];
    for (std::uint32_t j = 0; j < d; ++j) p.feats(i, j) = row[2 + j];
  }
  return p;
}

void write_patch_file(const std::filesystem::path& path, const PatchSet& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write patch file " + path.string());
  const std::uint32_t header[2] = {static_cast<std::uint32_t>(p.size()), static_cast<std::uint32_t>(p.dim())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<float> row(static_cast<std::size_t>(p.dim()) + 2);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    row[0] = static_cast<float>(p.coords(i, 0));
    row[1] = static_cast<float>(p.coords(i, 1));
    for (Eigen::Index j = 0; j < p.dim(); ++j) row[2 + j] = static_cast<float>(p.feats(i, j));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw DataError("failed writing patch file " + path.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Cohort load_cohort(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot open manifest " + manifest.string());
  const auto base = manifest.parent_path();
  std::string line;
  if (!std::getline(in, line)) throw DataError("manifest " + manifest.string() + ": empty");
  const auto header = split_csv(line);
  if (header != std::vector<std::string>{"id", "patch_file", "gene_file", "c", "t"})
    throw DataError("manifest " + manifest.string() + ": header must be id,patch_file,gene_file,c,t");
  Cohort cohort;
  cohort.provenance = "loaded from " + manifest.filename().string();
  std::set<std::string> ids;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 5)
      throw DataError("manifest line " + std::to_string(lineno) + ": expected 5 fields");
    Subject s;
    s.id = cells[0];
    if (s.id.empty()) throw DataError("manifest line " + std::to_string(lineno) + ": empty id");
    if (!ids.insert(s.id).second) throw DataError("manifest: duplicate subject id '" + s.id + "'");
    try {
      s.label.c = std::stoi(cells[3]);
      std::size_t used = 0;
      s.label.t = std::stod(cells[4], &used);
      if (used != cells[4].size()) throw std::invalid_argument("t");
    } catch (const std::exception&) {
      throw DataError("subject " + s.id + ": bad c or t field");
    }
    if (s.label.c != 0 && s.label.c != 1) throw DataError("subject " + s.id + ": c must be 0 or 1");
    if (!(s.label.t >= 0.0)) throw DataError("subject " + s.id + ": negative time");
    try {
      s.patches = read_patch_file(base / cells[1]);
      std::ifstream gf(base / cells[2]);
      if (!gf) throw DataError("cannot open gene file " + (base / cells[2]).string());
      s.genes = read_gene_groups(gf);
    } catch (const DataError& e) {
      throw DataError("subject " + s.id + ": " + e.what());
    }
    cohort.subjects.push_back(std::move(s));
  }
  if (cohort.subjects.empty()) throw DataError("manifest " + manifest.string() + ": no subjects");
  cohort.validate();
  return cohort;
}

std::filesystem::path save_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  cohort.validate();
  std::filesystem::create_directories(dir / "patches");
  std::filesystem::create_directories(dir / "genes");
  const auto manifest = dir / "manifest.csv";
  std::ofstream out(manifest);
  if (!out) throw DataError("cannot write manifest " + manifest.string());
  out << "id,patch_file,gene_file,c,t\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : cohort.subjects) {
    const std::string pf = "patches/" + s.id + ".bin";
    const std::string gf = "genes/" + s.id + ".txt";
    write_patch_file(dir / pf, s.patches);
    std::ofstream g(dir / gf);
    write_gene_groups(g, s.genes);
    out << s.id << ',' << pf << ',' << gf << ',' << s.label.c << ',' << s.label.t << '\n';
  }
  return manifest;
}

namespace {

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

RowVector unit_vector(Rng& rng, Eigen::Index d) {
  RowVector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v(j) = rng.normal();
  return v / v.norm();
}

}  // namespace

Cohort synth_cohort(const SynthSpec& spec) {
  if (spec.subjects < 4) throw ConfigError("synth_cohort: need at least 4 subjects");
  if (spec.patches < 2) throw ConfigError("synth_cohort: need at least 2 patches");
  if (spec.dim < 1) throw ConfigError("synth_cohort: dim must be >= 1");
  if (!(spec.censor_fraction >= 0.0 && spec.censor_fraction < 1.0))
    throw ConfigError("synth_cohort: censor_fraction must be in [0, 1)");
  if (spec.gene_widths.empty()) throw ConfigError("synth_cohort: need at least one gene group");

  constexpr double kPatchNoise = 1.0;
  constexpr double kGeneNoise = 1.0;
  constexpr double kTumorShift = 1.5;    // feature shift per unit latent risk
  constexpr double kGeneShift = 0.75;
  constexpr double kLogHazardSlope = 5.0;
  constexpr double kBaseRate = 1.0 / 24.0;
  constexpr double kTumorFraction = 0.5;

  Rng root(spec.seed);
  Rng proto_rng = root.split(1);
  Rng subject_rng = root.split(2);
  const Eigen::Index d = spec.dim;

  const RowVector background = 0.5 * unit_vector(proto_rng, d) * std::sqrt(double(d));
  const RowVector tumor = background + 2.0 * unit_vector(proto_rng, d);
  const RowVector risk_dir = unit_vector(proto_rng, d);
  std::vector<RowVector> gene_dirs;
  for (int w : spec.gene_widths) {
    if (w < 1) throw ConfigError("synth_cohort: gene widths must be >= 1");
    gene_dirs.push_back(unit_vector(proto_rng, w));
  }

  std::vector<int> classes(spec.subjects);
  for (int i = 0; i < spec.subjects; ++i) classes[i] = i % 2;
  subject_rng.shuffle(classes);

  const int side = static_cast<int>(std::ceil(std::sqrt(double(spec.patches))));
  Matrix grid(spec.patches, 2);
  for (int i = 0; i < spec.patches; ++i) {
    grid(i, 0) = i % side;
    grid(i, 1) = i / side;
  }
  const int n_tumor = std::max(1, static_cast<int>(std::lround(kTumorFraction * spec.patches)));
  const double odds = spec.censor_fraction / (1.0 - spec.censor_fraction);

  Cohort cohort;
  cohort.provenance = "synthetic seed=" + std::to_string(spec.seed) + " signal=" + std::to_string(spec.signal);
  for (int i = 0; i < spec.subjects; ++i) {
    Rng r = subject_rng.split(static_cast<std::uint64_t>(i));
    const double severity = r.uniform(0.5, 1.5);
    const double z = (classes[i] == 1 ? 1.0 : -1.0) * severity;
    const double effect = spec.signal * z;

    Subject s;
    char id[16];
    std::snprintf(id, sizeof(id), "S%03d", i);
    s.id = id;

    // contiguous tumor region around a random grid center
    const RowVector center = grid.row(static_cast<Eigen::Index>(r.below(spec.patches)));
    std::vector<int> order(spec.patches);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (grid.row(a) - center).squaredNorm() < (grid.row(b) - center).squaredNorm();
    });
    std::vector<bool> is_tumor(spec.patches, false);
    for (int j = 0; j < n_tumor; ++j) is_tumor[order[j]] = true;

    s.patches.coords = grid;
    s.patches.feats.resize(spec.patches, d);
    const RowVector tumor_center = tumor + kTumorShift * effect * risk_dir;
    for (int j = 0; j < spec.patches; ++j) {
      const RowVector& mean = is_tumor[j] ? tumor_center : background;
      for (Eigen::Index c = 0; c < d; ++c) s.patches.feats(j, c) = to_f32(mean(c) + kPatchNoise * r.normal());
    }

    s.genes.names.clear();
    for (std::size_t g = 0; g < spec.gene_widths.size(); ++g) {
      s.genes.names.push_back(g < default_group_names().size() ? default_group_names()[g]
                                                                : "group_" + std::to_string(g));
      RowVector v(spec.gene_widths[g]);
      for (Eigen::Index c = 0; c < v.size(); ++c)
        v(c) = to_f32(kGeneShift * effect * gene_dirs[g](c) + kGeneNoise * r.normal());
      s.genes.values.push_back(v);
    }

    const double rate = kBaseRate * std::exp(kLogHazardSlope * effect);
    const double event_time = r.exponential(rate);
    const double censor_time = odds > 0.0 ? r.exponential(rate * odds) : std::numeric_limits<double>::infinity();
    s.label.c = censor_time < event_time ? 1 : 0;
    s.label.t = std::min(event_time, censor_time);

    cohort.latent_class.push_back(classes[i]);
    cohort.latent_risk.push_back(z);
    cohort.subjects.push_back(std::move(s));
  }
  auto labels = cohort.labels();
  cohort.bin_edges = make_bins(labels, spec.bins);
  assign_bins(labels, cohort.bin_edges);
  for (std::size_t i = 0; i < labels.size(); ++i) cohort.subjects[i].label.bin = labels[i].bin;
  cohort.validate();
  return cohort;
}

}  // namespace mrepath
