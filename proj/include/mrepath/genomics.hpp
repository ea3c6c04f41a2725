#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mrepath/activation.hpp"
#include "mrepath/params.hpp"
#include "mrepath/rng.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

/// Default functional categories, in order.
const std::vector<std::string>& default_group_names();

/// Grouped genomic profile of one subject; each group is a row vector of its own width.
struct GeneGroups {
  std::vector<std::string> names;
  std::vector<RowVector> values;

  std::size_t size() const { return values.size(); }
  std::vector<Eigen::Index> widths() const;
  /// Throws DataError on empty input, duplicate or missing names, or non-finite values.
  void validate() const;
};

/// Shape of the genomics embedding network.
struct GenomicsSpec {
  std::vector<Eigen::Index> widths;  // per-group input width
  Eigen::Index hidden = 0;
  Eigen::Index dim = 0;  // output width d
  Activation sigma = Activation::ELU;
};

/// Adds "<prefix>.W1.<g>" (w_g x hidden), "<prefix>.b1.<g>", shared "<prefix>.W2"
/// (hidden x d) and "<prefix>.b2". Weights ~ N(0, 1/fan_in), biases zero.
void init_genomics_params(ParamStore& store, const std::string& prefix, const GenomicsSpec& spec, Rng& rng);

/// G (m x d): row g = sigma(x_g W1_g + b1_g) W2 + b2.
Var embed_groups(Tape& tape, const GeneGroups& g, ParamStore& params, const std::string& prefix,
                 const GenomicsSpec& spec);

Matrix embed_groups(const GeneGroups& g, ParamStore& params, const std::string& prefix,
                    const GenomicsSpec& spec);

/// Text grammar: first line "name:width name:width ...", then one line of
/// whitespace-separated reals per group in header order. '#' starts a comment line.
void write_gene_groups(std::ostream& os, const GeneGroups& g);
GeneGroups read_gene_groups(std::istream& is);

}  // namespace mrepath
