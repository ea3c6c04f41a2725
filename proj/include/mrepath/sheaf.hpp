#pragma once

#include <vector>

#include "mrepath/activation.hpp"
#include "mrepath/hypergraph.hpp"
#include "mrepath/params.hpp"
#include "mrepath/rng.hpp"
#include "mrepath/tape.hpp"

namespace mrepath {

/// A vertex-edge incidence. Pairs are enumerated edge-major, vertices in edge order.
struct Incidence {
  int vertex;
  int edge;
};

std::vector<Incidence> incidences(const Hypergraph& h);

/// Restriction maps F[v][e] (s x s) for every incidence of a hypergraph.
struct SheafStructure {
  int stalk_dim = 1;
  std::vector<Incidence> pairs;
  std::vector<Matrix> maps;  // aligned with pairs
};

/// Generator inputs: row p is [feats[v] ; mean of feats over edge e] for pair p.
Matrix restriction_inputs(const Hypergraph& h, const PatchSet& p);

/// Adds generator parameters "<prefix>.W" (2d x s^2) and "<prefix>.b" (1 x s^2).
/// The bias starts at vec(I_s) so fresh maps are near identity.
void init_sheaf_params(ParamStore& store, const std::string& prefix, Eigen::Index d, int s,
                       double weight_std, Rng& rng);

/// Differentiable map generator: returns P x s^2, row p = vec_rowmajor(F[pair p]).
Var restriction_maps(Tape& tape, const Matrix& inputs, const Var& weight, const Var& bias);

/// Value-level generator. With identity = true every map is I_s and params are ignored.
SheafStructure build_sheaf(const Hypergraph& h, const PatchSet& p, int s, const ParamStore& params,
                           const std::string& prefix, bool identity = false);

SheafStructure identity_sheaf(const Hypergraph& h, int s);

/// Propagation operator D^{-1/2} L_F D^{-1/2}, where block (i, j) of L_F is
/// sum_{e containing i, j} |e|^{-1} F[i][e]^T F[j][e] and D is block-diagonal with
/// D_i = sum_{e containing i} F[i][e]^T F[i][e]. With identity maps and s = 1 this
/// is exactly hgnn_operator(h). Vertices with a singular D_i are zeroed and flagged.
Operator sheaf_laplacian(const Hypergraph& h, const SheafStructure& sh);

/// Same operator, differentiable in the stacked maps (P x s^2, as from restriction_maps).
Var sheaf_operator(Tape& tape, const Hypergraph& h, const Var& maps, int s,
                   std::vector<int>* flagged = nullptr);

/// One propagation layer sigma(M x Theta). x is n x d; for s > 1 it is viewed as
/// (n s) x (d / s) stalks and theta is (d / s) x (d / s).
Var sheaf_layer(const Var& x, const Var& op, const Var& theta, Activation sigma, int s);

Matrix sheaf_layer(const Matrix& x, const Operator& op, const Matrix& theta, Activation sigma);

}  // namespace mrepath
