#include "mrepath/sheaf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>

#include "mrepath/ops.hpp"

namespace mrepath {

std::vector<Incidence> incidences(const Hypergraph& h) {
  std::vector<Incidence> out;
  for (std::size_t e = 0; e < h.edges.size(); ++e)
    for (int v : h.edges[e]) out.push_back({v, static_cast<int>(e)});
  return out;
}

Matrix restriction_inputs(const Hypergraph& h, const PatchSet& p) {
  const Eigen::Index d = p.dim();
  const auto pairs = incidences(h);
  Matrix edge_mean(static_cast<Eigen::Index>(h.edges.size()), d);
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    RowVector acc = RowVector::Zero(d);
    for (int v : h.edges[e]) acc += p.feats.row(v);
    edge_mean.row(static_cast<Eigen::Index>(e)) = acc / static_cast<double>(h.edges[e].size());
  }
  Matrix z(static_cast<Eigen::Index>(pairs.size()), 2 * d);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    z.row(static_cast<Eigen::Index>(i)).head(d) = p.feats.row(pairs[i].vertex);
    z.row(static_cast<Eigen::Index>(i)).tail(d) = edge_mean.row(pairs[i].edge);
  }
  return z;
}

void init_sheaf_params(ParamStore& store, const std::string& prefix, Eigen::Index d, int s,
                       double weight_std, Rng& rng) {
  if (s < 1) throw ConfigError("stalk dimension must be >= 1");
  store.add(prefix + ".W", rng.normal_matrix(2 * d, s * s, weight_std));
  Matrix bias = Matrix::Identity(s, s);
  store.add(prefix + ".b", reshape_row_major(bias, 1, s * s));
}

Var restriction_maps(Tape& tape, const Matrix& inputs, const Var& weight, const Var& bias) {
  return add_row(matmul(tape.constant(inputs), weight), bias);
}

SheafStructure identity_sheaf(const Hypergraph& h, int s) {
  if (s < 1) throw ConfigError("stalk dimension must be >= 1");
  SheafStructure sh;
  sh.stalk_dim = s;
  sh.pairs = incidences(h);
  sh.maps.assign(sh.pairs.size(), Matrix::Identity(s, s));
  return sh;
}

SheafStructure build_sheaf(const Hypergraph& h, const PatchSet& p, int s, const ParamStore& params,
                           const std::string& prefix, bool identity) {
  if (identity) return identity_sheaf(h, s);
  if (s < 1) throw ConfigError("stalk dimension must be >= 1");
  SheafStructure sh;
  sh.stalk_dim = s;
  sh.pairs = incidences(h);
  const Matrix& w = params.value(prefix + ".W");
  const Matrix& b = params.value(prefix + ".b");
  require_shape(w.rows() == 2 * p.dim() && w.cols() == s * s && b.rows() == 1 && b.cols() == s * s,
                "build_sheaf: generator parameters do not match d and s");
  const Matrix flat = (restriction_inputs(h, p) * w).rowwise() + b.row(0);
  sh.maps.reserve(sh.pairs.size());
  for (Eigen::Index i = 0; i < flat.rows(); ++i) sh.maps.push_back(reshape_row_major(flat.row(i), s, s));
  return sh;
}

namespace {

// Forward state of the sheaf operator, kept for the backward pass.
struct SheafKernel {
  int n = 0;
  int s = 1;
  std::vector<Matrix> maps;          // per incidence
  std::vector<Incidence> pairs;
  std::vector<std::vector<int>> edge_pairs;  // incidence indices per edge
  Matrix lap;                        // L_F, (n s) x (n s)
  Matrix inv_sqrt;                   // block-diagonal D^{-1/2}
  std::vector<Matrix> eigvecs;       // per vertex, for the D^{-1/2} derivative
  std::vector<Vector> eigvals;
  std::vector<bool> flagged;
  Matrix op;
};

constexpr double kSingularTol = 1e-12;

SheafKernel sheaf_forward(const Hypergraph& h, std::vector<Matrix> maps, int s) {
  SheafKernel k;
  k.n = h.n_vertices;
  k.s = s;
  k.pairs = incidences(h);
  k.maps = std::move(maps);
  require_shape(k.maps.size() == k.pairs.size(), "sheaf_laplacian: map count does not match incidences");
  const Eigen::Index ns = static_cast<Eigen::Index>(k.n) * s;

  k.edge_pairs.resize(h.edges.size());
  for (std::size_t p = 0; p < k.pairs.size(); ++p) k.edge_pairs[k.pairs[p].edge].push_back(static_cast<int>(p));

  std::vector<Matrix> degree(k.n, Matrix::Zero(s, s));
  for (std::size_t p = 0; p < k.pairs.size(); ++p)
    degree[k.pairs[p].vertex] += k.maps[p].transpose() * k.maps[p];

  k.lap = Matrix::Zero(ns, ns);
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const double w = 1.0 / static_cast<double>(h.edges[e].size());
    for (int pi : k.edge_pairs[e]) {
      const int i = k.pairs[pi].vertex;
      for (int pj : k.edge_pairs[e]) {
        const int j = k.pairs[pj].vertex;
        k.lap.block(i * s, j * s, s, s) += w * k.maps[pi].transpose() * k.maps[pj];
      }
    }
  }

  k.inv_sqrt = Matrix::Zero(ns, ns);
  k.eigvecs.assign(k.n, Matrix());
  k.eigvals.assign(k.n, Vector());
  k.flagged.assign(k.n, false);
  for (int v = 0; v < k.n; ++v) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(degree[v]);
    const Vector& lam = es.eigenvalues();
    if (lam.size() == 0 || lam.minCoeff() <= kSingularTol) {
      k.flagged[v] = true;
      continue;
    }
    k.eigvecs[v] = es.eigenvectors();
    k.eigvals[v] = lam;
    k.inv_sqrt.block(v * s, v * s, s, s) =
        es.eigenvectors() * lam.array().rsqrt().matrix().asDiagonal() * es.eigenvectors().transpose();
  }
  k.op = k.inv_sqrt * k.lap * k.inv_sqrt;
  k.op = 0.5 * (k.op + k.op.transpose()).eval();
  return k;
}

// Gradient of D^{-1/2} with respect to D, given its gradient bar_s (Daleckii-Krein).
Matrix inv_sqrt_backward(const Matrix& q, const Vector& lam, const Matrix& bar_s) {
  const Eigen::Index s = lam.size();
  Matrix kmat(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      const double la = lam(a), lb = lam(b);
      if (std::abs(la - lb) <= 1e-10 * std::max(la, lb))
        kmat(a, b) = -0.5 * std::pow(la, -1.5);
      else
        kmat(a, b) = (1.0 / std::sqrt(la) - 1.0 / std::sqrt(lb)) / (la - lb);
    }
  }
  return q * kmat.cwiseProduct(q.transpose() * bar_s * q) * q.transpose();
}

// Gradient with respect to each map, given dLoss/dOp.
std::vector<Matrix> sheaf_backward(const SheafKernel& k, const Matrix& g_in) {
  const int s = k.s;
  const Matrix g = 0.5 * (g_in + g_in.transpose());  // op is symmetrized in forward
  const Matrix bar_lap = k.inv_sqrt * g * k.inv_sqrt;
  const Matrix bar_s_full = g * k.inv_sqrt * k.lap + k.lap * k.inv_sqrt * g;

  std::vector<Matrix> bar_deg(k.n);
  for (int v = 0; v < k.n; ++v) {
    if (k.flagged[v]) continue;
    const Matrix bar_s = bar_s_full.block(v * s, v * s, s, s);
    bar_deg[v] = inv_sqrt_backward(k.eigvecs[v], k.eigvals[v], bar_s);
  }

  std::vector<Matrix> bar_maps(k.maps.size(), Matrix::Zero(s, s));
  for (std::size_t e = 0; e < k.edge_pairs.size(); ++e) {
    const double w = 1.0 / static_cast<double>(k.edge_pairs[e].size());
    for (int pi : k.edge_pairs[e]) {
      const int i = k.pairs[pi].vertex;
      for (int pj : k.edge_pairs[e]) {
        const int j = k.pairs[pj].vertex;
        const auto bij = bar_lap.block(i * s, j * s, s, s);
        const auto bji = bar_lap.block(j * s, i * s, s, s);
        bar_maps[pi] += w * k.maps[pj] * (bij.transpose() + bji);
      }
    }
  }
  for (std::size_t p = 0; p < k.pairs.size(); ++p) {
    const int v = k.pairs[p].vertex;
    if (k.flagged[v]) continue;
    bar_maps[p] += k.maps[p] * (bar_deg[v] + bar_deg[v].transpose());
  }
  return bar_maps;
}

std::vector<int> flagged_list(const SheafKernel& k) {
  std::vector<int> out;
  for (int v = 0; v < k.n; ++v)
    if (k.flagged[v]) out.push_back(v);
  return out;
}

}  // namespace

Operator sheaf_laplacian(const Hypergraph& h, const SheafStructure& sh) {
  SheafKernel k = sheaf_forward(h, sh.maps, sh.stalk_dim);
  Operator op;
  op.stalk_dim = sh.stalk_dim;
  op.flagged = flagged_list(k);
  op.matrix = std::move(k.op);
  return op;
}

Var sheaf_operator(Tape& tape, const Hypergraph& h, const Var& maps, int s, std::vector<int>* flagged) {
  require_shape(maps.cols() == s * s, "sheaf_operator: maps must have s^2 columns");
  std::vector<Matrix> blocks;
  blocks.reserve(maps.rows());
  for (Eigen::Index i = 0; i < maps.rows(); ++i) blocks.push_back(reshape_row_major(maps.value().row(i), s, s));
  auto kernel = std::make_shared<SheafKernel>(sheaf_forward(h, std::move(blocks), s));
  if (flagged != nullptr) *flagged = flagged_list(*kernel);
  Matrix out = kernel->op;
  return tape.record(std::move(out), {maps}, [maps, kernel, s](Tape& tp, const Matrix& g) {
    const auto bar = sheaf_backward(*kernel, g);
    Matrix flat(static_cast<Eigen::Index>(bar.size()), s * s);
    for (std::size_t p = 0; p < bar.size(); ++p)
      flat.row(static_cast<Eigen::Index>(p)) = reshape_row_major(bar[p], 1, s * s);
    tp.accumulate(maps, flat);
  });
}

Var sheaf_layer(const Var& x, const Var& op, const Var& theta, Activation sigma, int s) {
  if (s < 1) throw ConfigError("stalk dimension must be >= 1");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  require_shape(d % s == 0, "sheaf_layer: feature dim " + std::to_string(d) + " not divisible by s=" +
                                std::to_string(s));
  require_shape(op.rows() == n * s && op.cols() == n * s, "sheaf_layer: operator is " +
                                                              shape_str(op.rows(), op.cols()) + " for " +
                                                              std::to_string(n) + " vertices");
  if (s == 1) return activate(matmul(matmul(op, x), theta), sigma);
  const Var stalks = reshape(x, n * s, d / s);
  const Var out = activate(matmul(matmul(op, stalks), theta), sigma);
  return reshape(out, n, d);
}

Matrix sheaf_layer(const Matrix& x, const Operator& op, const Matrix& theta, Activation sigma) {
  Tape tape;
  return sheaf_layer(tape.constant(x), tape.constant(op.matrix), tape.constant(theta), sigma, op.stalk_dim)
      .value();
}

}  // namespace mrepath
