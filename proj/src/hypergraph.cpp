#include "mrepath/hypergraph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace mrepath {

void PatchSet::validate() const {
  if (coords.cols() != 2) throw DataError("PatchSet: coords must have 2 columns");
  if (coords.rows() != feats.rows())
    throw DataError("PatchSet: " + std::to_string(coords.rows()) + " coordinates but " +
                    std::to_string(feats.rows()) + " feature rows");
  if (!coords.allFinite() || !feats.allFinite()) throw DataError("PatchSet: non-finite values");
  std::set<std::pair<double, double>> seen;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    if (!seen.emplace(coords(i, 0), coords(i, 1)).second)
      throw DataError("PatchSet: duplicate coordinate (" + std::to_string(coords(i, 0)) + ", " +
                      std::to_string(coords(i, 1)) + ")");
  }
}

char kind_code(EdgeKind kind) { return kind == EdgeKind::Topological ? 'T' : 'F'; }

namespace {

// Effective k and any clamp warning.
int effective_k(int k, Eigen::Index n, std::vector<std::string>& warnings) {
  if (k < 0) throw ConfigError("hyperedge threshold k must be >= 0");
  if (k > 0 && n < 2) throw DataError("hyperedge construction needs at least 2 patches");
  if (k > 0 && k >= n) {
    warnings.push_back("k=" + std::to_string(k) + " clamped to n-1=" + std::to_string(n - 1));
    return static_cast<int>(n - 1);
  }
  return k;
}

// Anchored edge for vertex i from a score where smaller is better.
template <typename Score>
std::vector<int> anchored_edge(int i, int n, int k, Score score) {
  std::vector<int> others;
  others.reserve(n - 1);
  for (int j = 0; j < n; ++j)
    if (j != i) others.push_back(j);
  auto better = [&](int a, int b) {
    const double sa = score(a), sb = score(b);
    return sa != sb ? sa < sb : a < b;
  };
  std::partial_sort(others.begin(), others.begin() + k, others.end(), better);
  std::vector<int> edge{i};
  edge.insert(edge.end(), others.begin(), others.begin() + k);
  return edge;
}

}  // namespace

EdgeList build_topo_edges(const PatchSet& p, int k) {
  EdgeList out;
  const Eigen::Index n = p.size();
  out.n_vertices = static_cast<int>(n);
  out.k = effective_k(k, n, out.warnings);
  if (out.k == 0) return out;
  out.edges.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.edges.push_back(anchored_edge(i, static_cast<int>(n), out.k, [&](int j) {
      return (p.coords.row(i) - p.coords.row(j)).squaredNorm();
    }));
  }
  return out;
}

EdgeList build_feat_edges(const PatchSet& p, int k) {
  EdgeList out;
  const Eigen::Index n = p.size();
  out.n_vertices = static_cast<int>(n);
  out.k = effective_k(k, n, out.warnings);
  if (out.k == 0) return out;
  Matrix sim(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) sim(i, j) = sim(j, i) = cosine_sim(p.feats.row(i), p.feats.row(j));
  out.edges.reserve(n);
  for (int i = 0; i < n; ++i)
    out.edges.push_back(anchored_edge(i, static_cast<int>(n), out.k, [&](int j) { return -sim(i, j); }));
  return out;
}

void recompute_degrees(Hypergraph& h) {
  h.vertex_degree.assign(h.n_vertices, 0);
  h.edge_size.resize(h.edges.size());
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    h.edge_size[e] = static_cast<int>(h.edges[e].size());
    for (int v : h.edges[e]) {
      if (v < 0 || v >= h.n_vertices) throw DataError("hypergraph: vertex index out of range");
      ++h.vertex_degree[v];
    }
  }
}

namespace {

void append_unique(Hypergraph& h, std::set<std::vector<int>>& seen, const EdgeList& list, EdgeKind kind) {
  for (const auto& edge : list.edges) {
    std::vector<int> key = edge;
    std::sort(key.begin(), key.end());
    if (!seen.insert(std::move(key)).second) continue;
    h.edges.push_back(edge);
    h.kinds.push_back(kind);
  }
}

}  // namespace

Hypergraph make_hypergraph(const EdgeList& edges, EdgeKind kind) {
  Hypergraph h;
  h.n_vertices = edges.n_vertices;
  h.k = edges.k;
  std::set<std::vector<int>> seen;
  append_unique(h, seen, edges, kind);
  recompute_degrees(h);
  return h;
}

Hypergraph union_edges(const EdgeList& et, const EdgeList& ef) {
  if (et.n_vertices != ef.n_vertices)
    throw ShapeError("union_edges: vertex counts differ (" + std::to_string(et.n_vertices) + " vs " +
                     std::to_string(ef.n_vertices) + ")");
  Hypergraph h;
  h.n_vertices = et.n_vertices;
  h.k = std::max(et.k, ef.k);
  std::set<std::vector<int>> seen;
  append_unique(h, seen, et, EdgeKind::Topological);
  append_unique(h, seen, ef, EdgeKind::Feature);
  recompute_degrees(h);
  return h;
}

Matrix incidence_matrix(const Hypergraph& h) {
  Matrix inc = Matrix::Zero(h.n_vertices, static_cast<Eigen::Index>(h.edges.size()));
  for (std::size_t e = 0; e < h.edges.size(); ++e)
    for (int v : h.edges[e]) inc(v, static_cast<Eigen::Index>(e)) = 1.0;
  return inc;
}

Operator hgnn_operator(const Hypergraph& h) {
  Operator op;
  const Eigen::Index n = h.n_vertices;
  op.matrix = Matrix::Zero(n, n);
  if (h.empty()) {
    for (int v = 0; v < n; ++v) op.flagged.push_back(v);
    return op;
  }
  const Matrix inc = incidence_matrix(h);
  Vector inv_edge(inc.cols());
  for (Eigen::Index e = 0; e < inc.cols(); ++e) inv_edge(e) = 1.0 / inc.col(e).sum();
  Vector inv_sqrt_deg(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    const double deg = inc.row(v).sum();
    if (deg > 0.0) {
      inv_sqrt_deg(v) = 1.0 / std::sqrt(deg);
    } else {
      inv_sqrt_deg(v) = 0.0;
      op.flagged.push_back(static_cast<int>(v));
    }
  }
  op.matrix = inv_sqrt_deg.asDiagonal() * inc * inv_edge.asDiagonal() * inc.transpose() *
              inv_sqrt_deg.asDiagonal();
  // exact symmetry
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  return op;
}

void write_hypergraph(std::ostream& os, const Hypergraph& h) {
  os << h.n_vertices << ' ' << h.k << '\n';
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    os << kind_code(h.kinds[e]);
    for (int v : h.edges[e]) os << ' ' << v;
    os << '\n';
  }
}

Hypergraph read_hypergraph(std::istream& is) {
  Hypergraph h;
  std::string line;
  if (!std::getline(is, line)) throw DataError("hypergraph file: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> h.n_vertices >> h.k) || h.n_vertices < 0) throw DataError("hypergraph file: bad header '" + line + "'");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    char kind = 0;
    ls >> kind;
    if (kind != 'T' && kind != 'F') throw DataError("hypergraph file: bad edge kind in '" + line + "'");
    std::vector<int> edge;
    int v = 0;
    while (ls >> v) edge.push_back(v);
    if (edge.size() < 2) throw DataError("hypergraph file: edge with fewer than 2 vertices");
    h.edges.push_back(std::move(edge));
    h.kinds.push_back(kind == 'T' ? EdgeKind::Topological : EdgeKind::Feature);
  }
  recompute_degrees(h);
  return h;
}

}  // namespace mrepath
