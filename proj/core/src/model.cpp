#include "graphtx/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtx {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

}  // namespace

VariantDesc VariantDesc::parse(const std::string& s) {
  VariantDesc v;
  auto parts = split(s, ':');
  if (parts.empty()) throw std::invalid_argument("variant: empty descriptor");
  const std::string& family = parts[0];
  if (family == "vanilla") {
    if (parts.size() > 1) throw std::invalid_argument("variant: vanilla takes no arguments");
    return v;
  }
  if (parts.size() < 2) throw std::invalid_argument("variant: " + family + " needs a kind");
  v.kind = parts[1];
  if (family == "ga") {
    v.family = Family::Ga;
    if (v.kind != "before" && v.kind != "alternate" && v.kind != "parallel")
      throw std::invalid_argument("variant: unknown ga pattern " + v.kind);
    if (parts.size() > 2) v.gnn = gnn_kind_from_string(parts[2]);
    if (parts.size() > 3) throw std::invalid_argument("variant: too many ga arguments");
  } else if (family == "pe") {
    v.family = Family::Pe;
    if (v.kind != "degree" && v.kind != "eig" && v.kind != "svd")
      throw std::invalid_argument("variant: unknown pe kind " + v.kind);
    if (parts.size() > 2) {
      if (v.kind == "degree") throw std::invalid_argument("variant: pe:degree takes no size");
      v.pe_size = std::stoi(parts[2]);
    }
    if (parts.size() > 3) throw std::invalid_argument("variant: too many pe arguments");
  } else if (family == "at") {
    v.family = Family::At;
    if (v.kind == "mask-1" || v.kind == "spb" || v.kind == "edge-mask" || v.kind == "edge-bias") {
      if (parts.size() > 2) throw std::invalid_argument("variant: at:" + v.kind + " takes no arguments");
    } else if (v.kind == "mask-n") {
      if (parts.size() > 2) v.hops = std::stoi(parts[2]);
      if (v.hops < 1) throw std::invalid_argument("variant: mask-n hops must be >= 1");
    } else if (v.kind == "pma") {
      if (parts.size() > 2) v.views = std::stoi(parts[2]);
      if (v.views < 1) throw std::invalid_argument("variant: pma views must be >= 1");
    } else if (v.kind == "kernel") {
      if (parts.size() > 2) {
        if (parts[2] == "diffusion")
          v.kernel.kind = KernelKind::Diffusion;
        else if (parts[2] == "p-step-rw")
          v.kernel.kind = KernelKind::PStepRandomWalk;
        else
          throw std::invalid_argument("variant: unknown kernel kind " + parts[2]);
      }
      if (parts.size() > 3) v.kernel.param = std::stod(parts[3]);
      if (v.kernel.param < 0.0) throw std::invalid_argument("variant: kernel parameter must be >= 0");
    } else {
      throw std::invalid_argument("variant: unknown at kind " + v.kind);
    }
    if (parts.size() > 4) throw std::invalid_argument("variant: too many at arguments");
  } else {
    throw std::invalid_argument("variant: unknown family " + family);
  }
  return v;
}

std::string VariantDesc::str() const {
  switch (family) {
    case Family::Vanilla: return "vanilla";
    case Family::Ga: return "ga:" + kind + ":" + to_string(gnn);
    case Family::Pe:
      return kind == "degree" ? "pe:degree" : "pe:" + kind + ":" + std::to_string(pe_size);
    case Family::At:
      if (kind == "mask-n") return "at:mask-n:" + std::to_string(hops);
      if (kind == "pma") return "at:pma:" + std::to_string(views);
      if (kind == "kernel") {
        std::ostringstream os;
        os << "at:kernel:"
           << (kernel.kind == KernelKind::Diffusion ? "diffusion" : "p-step-rw") << ":"
           << kernel.param;
        return os.str();
      }
      return "at:" + kind;
  }
  return "?";
}

StructOptions struct_options_for(const VariantDesc& v) {
  StructOptions opts;
  opts.hop_masks = 1;
  if (v.family == VariantDesc::Family::At && v.kind == "mask-n") opts.hop_masks = v.hops;
  if (v.family == VariantDesc::Family::Pe && v.kind == "eig") opts.spectrum = true;
  if (v.family == VariantDesc::Family::At && v.kind == "kernel") opts.kernel = v.kernel;
  return opts;
}

Instance make_instance(Graph g, const VariantDesc& v, const ModelConfig& cfg, int n_pad,
                       int target_index, double target) {
  Instance inst;
  const int n = g.n();
  if (n_pad <= 0) n_pad = n;
  if (n_pad < n) throw std::invalid_argument("make_instance: n_pad below graph size");
  inst.n_pad = n_pad;
  inst.target_index = target_index;
  inst.target = target;

  inst.cache = StructCache::build(g, struct_options_for(v));
  inst.tokens = Matrix(n_pad, g.node_features().cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < inst.tokens.cols(); ++j) inst.tokens(i, j) = g.node_features()(i, j);
  inst.valid.assign(n_pad, 0.0);
  for (int i = 0; i < n; ++i) inst.valid[i] = 1.0;

  using Family = VariantDesc::Family;
  if (v.family == Family::At) {
    if (v.kind == "mask-1") {
      inst.head_masks = mask1_modifier(inst.cache, n_pad).head_masks;
    } else if (v.kind == "mask-n") {
      inst.head_masks = maskn_modifier(inst.cache, cfg.heads, v.hops, n_pad).head_masks;
    } else if (v.kind == "spb") {
      inst.spd_onehot = spd_bucket_onehot(inst.cache.spd, n_pad);
    } else if (v.kind == "pma") {
      inst.pma_phi = pma_phi_matrix(g, v.views, n_pad);
    } else if (v.kind == "kernel") {
      AttnModifier m = kernel_modifier(inst.cache, n_pad);
      inst.kernel = std::move(m.kernel);
      inst.deg_inv_sqrt = std::move(m.degree_inv_sqrt);
    } else if (v.kind == "edge-mask") {
      inst.head_masks.push_back(pad_embed(inst.cache.hop(1), n_pad));
      inst.e_flat = edge_flat_features(g, n_pad);
    } else if (v.kind == "edge-bias") {
      inst.bc_coeff = path_bias_coefficients(g, v.path_embeddings, n_pad);
    }
  } else if (v.family == Family::Pe) {
    if (v.kind == "degree") {
      inst.deg_onehot_in = degree_onehot(inst.cache.indegree, n_pad);
      if (g.directed()) inst.deg_onehot_out = degree_onehot(inst.cache.outdegree, n_pad);
    } else if (v.kind == "eig") {
      inst.pe_base =
          laplacian_pe_base(*inst.cache.eigenvalues, *inst.cache.eigenvectors, v.pe_size, n_pad);
    } else {
      inst.pe_base = svd_pe_base(g.adjacency(), v.pe_size, n_pad);
    }
  } else if (v.family == Family::Ga) {
    inst.gnn_ctx = GnnContext::build(g, n_pad);
  }
  inst.graph = std::move(g);
  return inst;
}

namespace {

Matrix uniform_init(int rows, int cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

Model Model::build(const ModelConfig& cfg, const VariantDesc& variant, int feature_dim, int out_dim,
                   bool directed, int edge_dim, uint64_t seed) {
  cfg.validate();
  if (variant.uses_edge_features() && edge_dim <= 0)
    throw std::invalid_argument("Model: " + variant.str() + " needs edge features");

  Model m;
  m.cfg = cfg;
  m.variant = variant;
  m.feature_dim = feature_dim;
  m.out_dim = out_dim;
  m.edge_dim = edge_dim;
  m.directed = directed;

  Rng rng = make_rng(seed, "init");
  auto push = [&m](const std::string& name, Matrix value) {
    m.index_[name] = static_cast<int>(m.params.size());
    m.names.push_back(name);
    m.params.push_back(std::move(value));
  };
  auto fan_in = [](int fan) { return 1.0 / std::sqrt(static_cast<double>(fan)); };

  const int d = cfg.d;
  push("in.w", uniform_init(feature_dim, d, fan_in(feature_dim), rng));
  push("in.b", uniform_init(1, d, fan_in(feature_dim), rng));

  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = "L" + std::to_string(l) + ".";
    for (const char* w : {"q", "k", "v", "o"}) push(p + w, uniform_init(d, d, fan_in(d), rng));
    push(p + "w1", uniform_init(d, cfg.d_f, fan_in(d), rng));
    push(p + "b1", uniform_init(1, cfg.d_f, fan_in(d), rng));
    push(p + "w2", uniform_init(cfg.d_f, d, fan_in(cfg.d_f), rng));
    push(p + "b2", uniform_init(1, d, fan_in(cfg.d_f), rng));
    push(p + "ln1_g", Matrix::filled(1, d, 1.0));
    push(p + "ln1_b", Matrix(1, d));
    push(p + "ln2_g", Matrix::filled(1, d, 1.0));
    push(p + "ln2_b", Matrix(1, d));
  }
  push("out.w", uniform_init(d, out_dim, fan_in(d), rng));
  push("out.b", uniform_init(1, out_dim, fan_in(d), rng));

  using Family = VariantDesc::Family;
  if (variant.family == Family::Pe) {
    if (variant.kind == "degree") {
      if (directed) {
        push("pe.deg_in", uniform_init(kDegreeBuckets, d, fan_in(d), rng));
        push("pe.deg_out", uniform_init(kDegreeBuckets, d, fan_in(d), rng));
      } else {
        push("pe.deg", uniform_init(kDegreeBuckets, d, fan_in(d), rng));
      }
    } else {
      const int width = variant.kind == "eig" ? variant.pe_size : 2 * variant.pe_size;
      push("pe.map_w", uniform_init(width, d, fan_in(width), rng));
      push("pe.map_b", uniform_init(1, d, fan_in(width), rng));
    }
  } else if (variant.family == Family::At) {
    if (variant.kind == "spb") {
      push("at.spb", Matrix(kSpdBuckets, cfg.heads));  // zero start = vanilla scores
    } else if (variant.kind == "pma") {
      push("at.pma", Matrix(variant.views, cfg.heads));
    } else if (variant.kind == "edge-mask") {
      push("at.we", uniform_init(edge_dim, d, fan_in(edge_dim), rng));
    } else if (variant.kind == "edge-bias") {
      push("at.pathw", uniform_init(variant.path_embeddings, edge_dim, fan_in(edge_dim), rng));
    }
  } else if (variant.family == Family::Ga) {
    const int sets = variant.kind == "before" ? variant.gnn_depth : cfg.layers;
    for (int i = 0; i < sets; ++i) {
      const std::string p = "ga" + std::to_string(i) + ".";
      if (variant.kind == "parallel") {
        push(p + "wr", uniform_init(d, d, fan_in(d), rng));
        continue;
      }
      switch (variant.gnn) {
        case GnnKind::Gcn:
          push(p + "w", uniform_init(d, d, fan_in(d), rng));
          break;
        case GnnKind::GatLite:
          push(p + "w", uniform_init(d, d, fan_in(d), rng));
          push(p + "a_src", uniform_init(d, 1, fan_in(d), rng));
          push(p + "a_dst", uniform_init(d, 1, fan_in(d), rng));
          break;
        case GnnKind::Gin:
          push(p + "eps", Matrix(1, 1));
          push(p + "w1", uniform_init(d, d, fan_in(d), rng));
          push(p + "b1", uniform_init(1, d, fan_in(d), rng));
          push(p + "w2", uniform_init(d, d, fan_in(d), rng));
          push(p + "b2", uniform_init(1, d, fan_in(d), rng));
          break;
      }
    }
  }
  return m;
}

int Model::param_index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

Matrix& Model::param(const std::string& name) {
  const int idx = param_index(name);
  if (idx < 0) throw std::out_of_range("Model: no parameter named " + name);
  return params[idx];
}

std::vector<NodeId> Model::bind(Tape& t) const {
  std::vector<NodeId> ids;
  ids.reserve(params.size());
  for (const auto& p : params) ids.push_back(t.leaf(p));
  return ids;
}

NodeId Model::forward(Tape& t, const std::vector<NodeId>& ids, const Instance& inst,
                      ReadoutKind readout, bool training, Rng* dropout_rng, Rng* aug_rng) const {
  auto P = [&](const std::string& name) {
    const int idx = param_index(name);
    if (idx < 0) throw std::out_of_range("Model::forward: missing parameter " + name);
    return ids[idx];
  };

  NodeId x = t.add_rowvec(t.matmul(t.constant(inst.tokens), P("in.w")), P("in.b"));

  using Family = VariantDesc::Family;
  if (variant.family == Family::Pe) {
    if (variant.kind == "degree") {
      NodeId pe = directed ? t.add(t.matmul(t.constant(inst.deg_onehot_in), P("pe.deg_in")),
                                   t.matmul(t.constant(inst.deg_onehot_out), P("pe.deg_out")))
                           : t.matmul(t.constant(inst.deg_onehot_in), P("pe.deg"));
      x = t.add(x, pe);
    } else {
      Matrix base = inst.pe_base;
      if (training && aug_rng) {
        if (variant.kind == "eig")
          flip_columns(base, *aug_rng);
        else
          flip_pairs(base, variant.pe_size, *aug_rng);
      }
      NodeId mapped = t.add_rowvec(t.matmul(t.constant(base), P("pe.map_w")), P("pe.map_b"));
      x = t.add(x, mapped);
    }
  }

  std::vector<AttnModifier> mods;
  if (variant.family == Family::At) {
    if (variant.kind == "mask-1" || variant.kind == "mask-n") {
      AttnModifier mod;
      mod.kind = AttnModifier::Kind::Mask;
      mod.head_masks = inst.head_masks;
      mods.push_back(std::move(mod));
    } else if (variant.kind == "spb") {
      mods.push_back(spatial_bias_modifier(t, inst.spd_onehot, P("at.spb"), cfg.heads, inst.n_pad));
    } else if (variant.kind == "pma") {
      mods.push_back(pma_bias_modifier(t, inst.pma_phi, P("at.pma"), cfg.heads, inst.n_pad));
    } else if (variant.kind == "edge-mask") {
      mods.push_back(edge_mask_modifier(t, inst.head_masks[0], inst.e_flat, P("at.we"), inst.n_pad));
    } else if (variant.kind == "edge-bias") {
      mods.push_back(edge_path_bias_modifier(t, inst.bc_coeff, P("at.pathw"), inst.n_pad));
    } else if (variant.kind == "kernel") {
      AttnModifier mod;
      mod.kind = AttnModifier::Kind::KernelHadamard;
      mod.kernel = inst.kernel;
      mod.shared_qk = true;
      mod.degree_norm_residual = true;
      mod.degree_inv_sqrt = inst.deg_inv_sqrt;
      mods.push_back(std::move(mod));
    }
  }

  auto gnn_ids = [&](int i) {
    GnnParamIds g;
    g.kind = variant.gnn;
    const std::string p = "ga" + std::to_string(i) + ".";
    switch (variant.gnn) {
      case GnnKind::Gcn:
        g.w = P(p + "w");
        break;
      case GnnKind::GatLite:
        g.w = P(p + "w");
        g.a_src = P(p + "a_src");
        g.a_dst = P(p + "a_dst");
        break;
      case GnnKind::Gin:
        g.eps = P(p + "eps");
        g.w1 = P(p + "w1");
        g.b1 = P(p + "b1");
        g.w2 = P(p + "w2");
        g.b2 = P(p + "b2");
        break;
    }
    return g;
  };

  BlockHook hook;
  if (variant.family == Family::Ga) {
    if (variant.kind == "before") {
      std::vector<GnnParamIds> stack;
      for (int i = 0; i < variant.gnn_depth; ++i) stack.push_back(gnn_ids(i));
      x = gnn_stack_with_residual(t, inst.gnn_ctx, x, stack, cfg.activation);
    } else if (variant.kind == "alternate") {
      hook = [this, &inst, &gnn_ids](Tape& tt, NodeId m, int layer) {
        return tt.add(m, gnn_layer_forward(tt, inst.gnn_ctx, m, gnn_ids(layer), cfg.activation));
      };
    } else {  // parallel: M' = M + norm_adj * X0 * W_r, recomputed per block
      NodeId x0 = x;
      NodeId adj = t.constant(inst.gnn_ctx.norm_adj);
      hook = [x0, adj, &P](Tape& tt, NodeId m, int layer) {
        NodeId gres = tt.matmul(tt.matmul(adj, x0), P("ga" + std::to_string(layer) + ".wr"));
        return tt.add(m, gres);
      };
    }
  }

  std::vector<LayerParamIds> layers(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    const std::string p = "L" + std::to_string(l) + ".";
    layers[l] = LayerParamIds{P(p + "q"),     P(p + "k"),     P(p + "v"),     P(p + "o"),
                              P(p + "w1"),    P(p + "b1"),    P(p + "w2"),    P(p + "b2"),
                              P(p + "ln1_g"), P(p + "ln1_b"), P(p + "ln2_g"), P(p + "ln2_b")};
  }

  TrainContext tc;
  tc.dropout_rng = dropout_rng;
  tc.attn_dropout = cfg.attn_dropout;
  tc.ffn_dropout = cfg.ffn_dropout;

  NodeId read = model_forward(t, x, layers, cfg, mods, readout, inst.target_index, &inst.valid,
                              training ? &tc : nullptr, hook);
  return t.add_rowvec(t.matmul(read, P("out.w")), P("out.b"));
}

}  // namespace gtx
