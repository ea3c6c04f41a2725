#include "mrepath/genomics.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "mrepath/ops.hpp"

namespace mrepath {

const std::vector<std::string>& default_group_names() {
  static const std::vector<std::string> names = {
      "tumor_suppression", "oncogenesis", "protein_kinases",
      "cellular_differentiation", "transcription", "cytokines_growth"};
  return names;
}

std::vector<Eigen::Index> GeneGroups::widths() const {
  std::vector<Eigen::Index> w;
  for (const auto& v : values) w.push_back(v.size());
  return w;
}

void GeneGroups::validate() const {
  if (values.empty()) throw DataError("gene groups: at least one group required");
  if (names.size() != values.size()) throw DataError("gene groups: name count does not match group count");
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw DataError("gene groups: duplicate group name '" + n + "'");
  for (std::size_t g = 0; g < values.size(); ++g) {
    if (values[g].size() == 0) throw DataError("gene groups: group '" + names[g] + "' is empty");
    if (!values[g].allFinite()) throw DataError("gene groups: non-finite value in '" + names[g] + "'");
  }
}

void init_genomics_params(ParamStore& store, const std::string& prefix, const GenomicsSpec& spec, Rng& rng) {
  if (spec.hidden < 1 || spec.dim < 1) throw ConfigError("genomics: hidden and output widths must be >= 1");
  for (std::size_t g = 0; g < spec.widths.size(); ++g) {
    const auto w = spec.widths[g];
    store.add(prefix + ".W1." + std::to_string(g), rng.normal_matrix(w, spec.hidden, 1.0 / std::sqrt(double(w))));
    store.add(prefix + ".b1." + std::to_string(g), Matrix::Zero(1, spec.hidden));
  }
  store.add(prefix + ".W2", rng.normal_matrix(spec.hidden, spec.dim, 1.0 / std::sqrt(double(spec.hidden))));
  store.add(prefix + ".b2", Matrix::Zero(1, spec.dim));
}

Var embed_groups(Tape& tape, const GeneGroups& g, ParamStore& params, const std::string& prefix,
                 const GenomicsSpec& spec) {
  if (g.size() != spec.widths.size())
    throw ShapeError("embed_groups: " + std::to_string(g.size()) + " groups, network expects " +
                     std::to_string(spec.widths.size()));
  std::vector<Var> hidden;
  hidden.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.values[i].size() != spec.widths[i])
      throw ShapeError("embed_groups: group " + std::to_string(i) + " has width " +
                       std::to_string(g.values[i].size()) + ", expected " + std::to_string(spec.widths[i]));
    const Var x = tape.constant(g.values[i]);
    const Var w1 = tape.param(params, prefix + ".W1." + std::to_string(i));
    const Var b1 = tape.param(params, prefix + ".b1." + std::to_string(i));
    hidden.push_back(activate(add_row(matmul(x, w1), b1), spec.sigma));
  }
  const Var stacked = concat_rows(hidden);
  return add_row(matmul(stacked, tape.param(params, prefix + ".W2")), tape.param(params, prefix + ".b2"));
}

Matrix embed_groups(const GeneGroups& g, ParamStore& params, const std::string& prefix, const GenomicsSpec& spec) {
  Tape tape;
  return embed_groups(tape, g, params, prefix, spec).value();
}

void write_gene_groups(std::ostream& os, const GeneGroups& g) {
  g.validate();
  for (std::size_t i = 0; i < g.size(); ++i) os << (i ? " " : "") << g.names[i] << ':' << g.values[i].size();
  os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& row : g.values) {
    for (Eigen::Index j = 0; j < row.size(); ++j) os << (j ? " " : "") << row(j);
    os << '\n';
  }
}

namespace {

bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

GeneGroups read_gene_groups(std::istream& is) {
  GeneGroups g;
  std::string line;
  if (!next_content_line(is, line)) throw DataError("gene file: missing header");
  std::vector<Eigen::Index> widths;
  {
    std::istringstream hs(line);
    std::string tok;
    while (hs >> tok) {
      const auto colon = tok.rfind(':');
      if (colon == std::string::npos || colon == 0) throw DataError("gene file: bad header token '" + tok + "'");
      long w = 0;
      try {
        w = std::stol(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw DataError("gene file: bad width in '" + tok + "'");
      }
      if (w < 1) throw DataError("gene file: width must be positive in '" + tok + "'");
      g.names.push_back(tok.substr(0, colon));
      widths.push_back(w);
    }
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (!next_content_line(is, line)) throw DataError("gene file: missing values for group '" + g.names[i] + "'");
    std::istringstream ls(line);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DataError("gene file: bad number '" + tok + "' in group '" + g.names[i] + "'");
      }
    }
    if (static_cast<Eigen::Index>(vals.size()) != widths[i])
      throw DataError("gene file: group '" + g.names[i] + "' has " + std::to_string(vals.size()) +
                      " values, header says " + std::to_string(widths[i]));
    g.values.push_back(Eigen::Map<RowVector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  g.validate();
  return g;
}

}  // namespace mrepath
