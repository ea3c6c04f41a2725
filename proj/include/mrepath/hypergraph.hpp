#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mrepath/matrix.hpp"

namespace mrepath {

/// Patch features of one slide with grid coordinates (n x 2) and features (n x d).
struct PatchSet {
  Matrix coords;
  Matrix feats;

  Eigen::Index size() const { return feats.rows(); }
  Eigen::Index dim() const { return feats.cols(); }

  /// Throws DataError on row-count mismatch, non-finite values or duplicate coordinates.
  void validate() const;
};

enum class EdgeKind { Topological, Feature };

char kind_code(EdgeKind kind);

/// Anchored neighborhoods: edge i is {i} followed by its neighbors in rank order.
struct EdgeList {
  int n_vertices = 0;
  int k = 0;  // effective neighbor count after clamping
  std::vector<std::vector<int>> edges;
  std::vector<std::string> warnings;
};

struct Hypergraph {
  int n_vertices = 0;
  int k = 0;
  std::vector<std::vector<int>> edges;
  std::vector<EdgeKind> kinds;
  std::vector<int> vertex_degree;  // edges containing each vertex
  std::vector<int> edge_size;

  std::size_t n_edges() const { return edges.size(); }
  bool empty() const { return edges.empty(); }
};

/// Propagation operator on (n * stalk_dim) stacked vertex stalks.
struct Operator {
  Matrix matrix;
  int stalk_dim = 1;
  std::vector<int> flagged;  // vertices whose rows/cols were zeroed
};

/// One edge per vertex: the vertex plus its k nearest patches by Euclidean
/// distance on coords, ties broken by vertex index. k = 0 yields no edges;
/// k >= n is clamped to n - 1 with a warning.
EdgeList build_topo_edges(const PatchSet& p, int k);

/// One edge per vertex: the vertex plus its k most cosine-similar patches
/// (self excluded), ties broken by vertex index. Zero rows have similarity 0.
EdgeList build_feat_edges(const PatchSet& p, int k);

/// Builds a hypergraph from a single edge list, dropping duplicate vertex sets.
Hypergraph make_hypergraph(const EdgeList& edges, EdgeKind kind);

/// Concatenates topological then feature edges, dropping exact duplicate
/// vertex sets (the first occurrence, and so the topological label, wins).
Hypergraph union_edges(const EdgeList& et, const EdgeList& ef);

/// Recomputes vertex_degree and edge_size from edges.
void recompute_degrees(Hypergraph& h);

/// Dense n x |E| incidence matrix.
Matrix incidence_matrix(const Hypergraph& h);

/// D_v^{-1/2} H D_e^{-1} H^T D_v^{-1/2} with unit edge weights. Isolated vertices
/// get zero rows/cols and are listed in Operator::flagged.
Operator hgnn_operator(const Hypergraph& h);

/// Text format: header "n k", then one edge per line "T|F v0 v1 ...".
void write_hypergraph(std::ostream& os, const Hypergraph& h);
Hypergraph read_hypergraph(std::istream& is);

}  // namespace mrepath
