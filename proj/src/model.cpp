#include "mrepath/model.hpp"

#include <cmath>
#include <tuple>

#include "mrepath/ops.hpp"

namespace mrepath {

PreparedSubject prepare_subject(const Subject& s, const RunConfig& cfg) {
  PreparedSubject out;
  out.subject = &s;
  if (cfg.graph_mode == GraphMode::None || cfg.k == 0) return out;
  const PatchSet& p = s.patches;
  switch (cfg.graph_mode) {
    case GraphMode::SheafT:
      out.graph = make_hypergraph(build_topo_edges(p, cfg.k), EdgeKind::Topological);
      break;
    case GraphMode::SheafF:
      out.graph = make_hypergraph(build_feat_edges(p, cfg.k), EdgeKind::Feature);
      break;
    default:
      out.graph = union_edges(build_topo_edges(p, cfg.k), build_feat_edges(p, cfg.k));
      break;
  }
  out.use_graph = !out.graph.empty();
  if (!out.use_graph) return out;
  if (cfg.graph_mode == GraphMode::Hgnn) {
    out.fixed_operator = hgnn_operator(out.graph).matrix;
  } else if (cfg.identity_maps) {
    out.fixed_operator = sheaf_laplacian(out.graph, identity_sheaf(out.graph, cfg.stalk_dim)).matrix;
  } else {
    out.restriction_inputs = restriction_inputs(out.graph, p);
  }
  return out;
}

Model::Model(const RunConfig& cfg, Eigen::Index dim, std::vector<Eigen::Index> gene_widths) : cfg_(cfg), dim_(dim) {
  cfg_.validate_for_dim(static_cast<long>(dim));
  geno_.widths = std::move(gene_widths);
  geno_.hidden = cfg_.genomics_hidden > 0 ? cfg_.genomics_hidden : dim;
  geno_.dim = dim;
  geno_.sigma = cfg_.activation;
}

Model Model::init(const RunConfig& cfg, Eigen::Index dim, std::vector<Eigen::Index> gene_widths, Rng& rng) {
  Model m(cfg, dim, std::move(gene_widths));
  ParamStore& ps = m.params_;
  const int s = m.cfg_.stalk_dim;
  const bool graph = m.cfg_.graph_mode != GraphMode::None && m.cfg_.k > 0;
  const bool sheaf = graph && m.cfg_.graph_mode != GraphMode::Hgnn;
  if (sheaf && !m.cfg_.identity_maps) init_sheaf_params(ps, "sheaf", dim, s, 0.1 / std::sqrt(2.0 * dim), rng);
  if (graph) {
    const Eigen::Index w = sheaf ? dim / s : dim;
    for (int l = 0; l < m.cfg_.layers; ++l)
      ps.add("graph.theta." + std::to_string(l),
             Matrix::Identity(w, w) + rng.normal_matrix(w, w, 0.1 / std::sqrt(double(w))));
  }
  init_genomics_params(ps, "geno", m.geno_, rng);
  if (m.cfg_.weighting.dynamic) {
    const Eigen::Index hidden = m.cfg_.confidence_hidden > 0 ? m.cfg_.confidence_hidden : dim;
    init_confidence_params(ps, "conf.p", dim, hidden, rng);
    init_confidence_params(ps, "conf.g", dim, hidden, rng);
  }
  init_attention_params(ps, "attn", dim, rng);
  init_hazard_params(ps, "head", dim, m.cfg_.bins, m.cfg_.head_init_std, rng);
  return m;
}

ForwardResult Model::forward(Tape& tape, const PreparedSubject& s, bool capture_attention) {
  const Subject& subj = *s.subject;
  require_shape(subj.patches.dim() == dim_, "model: subject " + subj.id + " has feature dim " +
                                               std::to_string(subj.patches.dim()) + ", model expects " +
                                               std::to_string(dim_));
  ForwardResult out;
  Var p_h = tape.constant(subj.patches.feats);
  if (s.use_graph) {
    const bool sheaf = cfg_.graph_mode != GraphMode::Hgnn;
    const int stalk = sheaf ? cfg_.stalk_dim : 1;
    Var op;
    if (s.fixed_operator.size() > 0) {
      op = tape.constant(s.fixed_operator);
    } else {
      const Var maps = restriction_maps(tape, s.restriction_inputs, tape.param(params_, "sheaf.W"),
                                        tape.param(params_, "sheaf.b"));
      op = sheaf_operator(tape, s.graph, maps, stalk);
    }
    for (int l = 0; l < cfg_.layers; ++l)
      p_h = sheaf_layer(p_h, op, tape.param(params_, "graph.theta." + std::to_string(l)), cfg_.activation, stalk);
  }

  const Var g = embed_groups(tape, subj.genes, params_, "geno", geno_);

  Var p_w, g_w;
  if (cfg_.weighting.dynamic) {
    std::tie(p_w, g_w) = rebalance(p_h, g, params_, "conf", &out.confidence);
  } else {
    const auto [wp, wg] = fixed_weights(cfg_.weighting.w_p, cfg_.weighting.w_g);
    p_w = scale(p_h, wp);
    g_w = scale(g, wg);
    out.confidence.w_p = wp;
    out.confidence.w_g = wg;
  }

  const FusedVars fused = fuse(p_w, g_w, params_, "attn", cfg_.fusion, capture_attention ? &out.attention : nullptr);
  out.hazards = hazard_head(fused, params_, "head");
  return out;
}

Matrix Model::predict(const PreparedSubject& s) {
  Tape tape;
  return forward(tape, s).hazards.value();
}

Adam::Adam(const ParamStore& params, double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& name : params.names()) {
    const Matrix& v = params.value(name);
    m_.push_back(Matrix::Zero(v.rows(), v.cols()));
    v_.push_back(Matrix::Zero(v.rows(), v.cols()));
  }
}

void Adam::step(ParamStore& params) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.names().size(); ++i) {
    const auto& name = params.names()[i];
    Matrix& theta = params.value(name);
    const Matrix g = params.grad(name) + wd_ * theta;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseAbs2();
    const Matrix m_hat = m_[i] / c1;
    const Matrix v_hat = v_[i] / c2;
    theta.array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + eps_);
  }
}

}  // namespace mrepath
