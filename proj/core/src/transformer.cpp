#include "graphtx/transformer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gtx {

namespace {
const double kNegInf = -std::numeric_limits<double>::infinity();

Matrix dropout_mask(int rows, int cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 - rate;
  const double inv = 1.0 / keep;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.bernoulli(keep) ? inv : 0.0;
  return m;
}

NodeId activate(Tape& t, NodeId x, Activation act) {
  return act == Activation::Relu ? t.relu(x) : t.gelu(x);
}

/// Combines a structural 0/1 mask (may be empty = all permitted) with pad
/// validity: pad columns are excluded from every row, pad rows keep only
/// themselves so no row degenerates.
Matrix combined_fill_mask(const Matrix* structural, int n, const std::vector<double>* pad_valid) {
  Matrix m = structural ? *structural : Matrix::filled(n, n, 1.0);
  if (pad_valid) {
    for (int i = 0; i < n; ++i) {
      const bool row_pad = (*pad_valid)[i] == 0.0;
      for (int j = 0; j < n; ++j) {
        if (row_pad)
          m(i, j) = i == j ? 1.0 : 0.0;
        else if ((*pad_valid)[j] == 0.0)
          m(i, j) = 0.0;
      }
    }
  }
  return m;
}

}  // namespace

SizeTag size_tag_from_string(const std::string& s) {
  if (s == "small") return SizeTag::Small;
  if (s == "middle") return SizeTag::Middle;
  if (s == "large") return SizeTag::Large;
  throw std::invalid_argument("unknown size tag: " + s);
}

std::string to_string(SizeTag tag) {
  switch (tag) {
    case SizeTag::Small: return "small";
    case SizeTag::Middle: return "middle";
    case SizeTag::Large: return "large";
  }
  return "?";
}

ModelConfig ModelConfig::from_size(SizeTag tag) {
  ModelConfig c;
  c.size = tag;
  switch (tag) {
    case SizeTag::Small:
      c.layers = 6; c.d = 80; c.d_f = 80; c.heads = 8; c.head_dim = 10;
      break;
    case SizeTag::Middle:
      c.layers = 12; c.d = 80; c.d_f = 80; c.heads = 8; c.head_dim = 10;
      break;
    case SizeTag::Large:
      c.layers = 12; c.d = 512; c.d_f = 512; c.heads = 32; c.head_dim = 16;
      break;
  }
  return c;
}

void ModelConfig::validate() const {
  if (layers < 0 || d <= 0 || d_f <= 0 || heads <= 0 || head_dim <= 0)
    throw std::invalid_argument("ModelConfig: dimensions must be positive");
  if (heads * head_dim != d)
    throw std::invalid_argument("ModelConfig: heads * head_dim must equal d");
}

Matrix attention_scores(const Matrix& x, const Matrix& q, const Matrix& k, int scale_dim) {
  return scale(matmul_nt(matmul(x, q), matmul(x, k)), 1.0 / std::sqrt(double(scale_dim)));
}

NodeId mhsa_forward(Tape& t, NodeId x, const LayerParamIds& p, const ModelConfig& cfg,
                    const AttnModifier& mod, const std::vector<double>* pad_valid,
                    TrainContext* train, std::vector<NodeId>* attn_out) {
  const int n = t.value(x).rows();
  const int dh = cfg.head_dim;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(cfg.d));
  using Kind = AttnModifier::Kind;

  if (mod.kind == Kind::Mask && mod.head_masks.empty())
    throw std::invalid_argument("mhsa_forward: Mask modifier without masks");

  std::vector<NodeId> heads;
  heads.reserve(cfg.heads);
  for (int h = 0; h < cfg.heads; ++h) {
    NodeId qh = t.slice_cols(p.q, h * dh, (h + 1) * dh);
    NodeId kh = mod.shared_qk ? qh : t.slice_cols(p.k, h * dh, (h + 1) * dh);
    NodeId vh = t.slice_cols(p.v, h * dh, (h + 1) * dh);
    NodeId scores = t.scale(t.matmul_nt(t.matmul(x, qh), t.matmul(x, kh)), inv_sqrt_d);

    if (mod.kind == Kind::KernelHadamard) scores = t.hadamard(scores, t.constant(mod.kernel));
    if (mod.kind == Kind::Mask && mod.score_scale >= 0)
      scores = t.hadamard(scores, mod.score_scale);
    if (mod.kind == Kind::AdditiveBias) {
      const auto& biases = mod.head_bias;
      scores = t.add(scores, biases.size() == 1 ? biases[0] : biases.at(h));
    }

    const Matrix* structural = nullptr;
    if (mod.kind == Kind::Mask)
      structural = mod.head_masks.size() == 1 ? &mod.head_masks[0] : &mod.head_masks.at(h);
    if (structural || pad_valid)
      scores = t.masked_fill(scores, combined_fill_mask(structural, n, pad_valid), kNegInf);

    NodeId attn = t.row_softmax(scores);
    if (attn_out) attn_out->push_back(attn);
    if (train && train->dropout_rng && train->attn_dropout > 0.0)
      attn = t.hadamard(attn,
                        t.constant(dropout_mask(n, n, train->attn_dropout, *train->dropout_rng)));
    heads.push_back(t.matmul(attn, t.matmul(x, vh)));
  }

  NodeId mixed = cfg.heads == 1 ? heads[0] : t.concat_cols(heads);
  NodeId branch = t.matmul(mixed, p.o);
  if (mod.degree_norm_residual) {
    Matrix rowscale(n, cfg.d);
    for (int i = 0; i < n; ++i) {
      const double f = i < static_cast<int>(mod.degree_inv_sqrt.size()) ? mod.degree_inv_sqrt[i] : 1.0;
      for (int j = 0; j < cfg.d; ++j) rowscale(i, j) = f;
    }
    branch = t.hadamard(branch, t.constant(rowscale));
  }
  return t.layer_norm(t.add(branch, x), p.ln1_gain, p.ln1_bias, kLayerNormEps);
}

NodeId ffn_forward(Tape& t, NodeId m, const LayerParamIds& p, const ModelConfig& cfg,
                   TrainContext* train) {
  NodeId hidden = activate(t, t.add_rowvec(t.matmul(m, p.w1), p.b1), cfg.activation);
  if (train && train->dropout_rng && train->ffn_dropout > 0.0) {
    const Matrix& hv = t.value(hidden);
    hidden = t.hadamard(
        hidden,
        t.constant(dropout_mask(hv.rows(), hv.cols(), train->ffn_dropout, *train->dropout_rng)));
  }
  NodeId f = t.add_rowvec(t.matmul(hidden, p.w2), p.b2);
  return t.layer_norm(t.add(m, f), p.ln2_gain, p.ln2_bias, kLayerNormEps);
}

NodeId apply_readout(Tape& t, NodeId x, ReadoutKind readout, int target_index,
                     const std::vector<double>* pad_valid) {
  const int n = t.value(x).rows();
  switch (readout) {
    case ReadoutKind::PerNode:
      return x;
    case ReadoutKind::MaskedMean: {
      Matrix w(1, n);
      double count = 0.0;
      for (int i = 0; i < n; ++i) count += pad_valid ? (*pad_valid)[i] : 1.0;
      if (count == 0.0) throw std::invalid_argument("apply_readout: no valid tokens");
      for (int i = 0; i < n; ++i) w(0, i) = (pad_valid ? (*pad_valid)[i] : 1.0) / count;
      return t.matmul(t.constant(w), x);
    }
    case ReadoutKind::TargetNode: {
      if (target_index < 0 || target_index >= n)
        throw std::invalid_argument("apply_readout: target index out of range");
      Matrix w(1, n);
      w(0, target_index) = 1.0;
      return t.matmul(t.constant(w), x);
    }
  }
  throw std::logic_error("apply_readout: unreachable");
}

NodeId model_forward(Tape& t, NodeId tokens, const std::vector<LayerParamIds>& params,
                     const ModelConfig& cfg, const std::vector<AttnModifier>& mods,
                     ReadoutKind readout, int target_index, const std::vector<double>* pad_valid,
                     TrainContext* train, const BlockHook& hook) {
  if (static_cast<int>(params.size()) != cfg.layers)
    throw std::invalid_argument("model_forward: params length != layers");
  if (!mods.empty() && mods.size() != 1 && static_cast<int>(mods.size()) != cfg.layers)
    throw std::invalid_argument("model_forward: mods must be shared or per-layer");

  static const AttnModifier kNone{};
  NodeId x = tokens;
  for (int l = 0; l < cfg.layers; ++l) {
    const AttnModifier& mod = mods.empty() ? kNone : (mods.size() == 1 ? mods[0] : mods[l]);
    NodeId m = mhsa_forward(t, x, params[l], cfg, mod, pad_valid, train);
    if (hook) m = hook(t, m, l);
    x = ffn_forward(t, m, params[l], cfg, train);
  }
  return apply_readout(t, x, readout, target_index, pad_valid);
}

}  // namespace gtx
