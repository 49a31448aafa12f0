#include "graphtx/tape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gtx {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}

NodeId Tape::push(Matrix value, bool needs_grad, BackFn back, bool is_leaf) {
  Node n;
  n.value = std::move(value);
  n.back = std::move(back);
  n.needs_grad = needs_grad;
  n.is_leaf = is_leaf;
  nodes_.push_back(std::move(n));
  const NodeId id = static_cast<NodeId>(nodes_.size()) - 1;
  if (is_leaf) leaves_.push_back(id);
  return id;
}

void Tape::accumulate(std::vector<Matrix>& grads, NodeId id, const Matrix& delta) {
  if (grads[id].empty())
    grads[id] = delta;
  else {
    double* g = grads[id].data();
    const double* d = delta.data();
    for (size_t i = 0; i < delta.size(); ++i) g[i] += d[i];
  }
}

void Tape::accumulate_scaled(std::vector<Matrix>& grads, NodeId id, const Matrix& delta, double s) {
  if (grads[id].empty()) grads[id] = Matrix(delta.rows(), delta.cols());
  double* g = grads[id].data();
  const double* d = delta.data();
  for (size_t i = 0; i < delta.size(); ++i) g[i] += s * d[i];
}

NodeId Tape::leaf(Matrix v) { return push(std::move(v), true, nullptr, true); }

NodeId Tape::constant(Matrix v) { return push(std::move(v), false, nullptr, false); }

NodeId Tape::add(NodeId a, NodeId b) {
  Matrix out = gtx::add(nodes_[a].value, nodes_[b].value);
  const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [a, b](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate(grads, a, g);
                if (t.needs_grad(b)) accumulate(grads, b, g);
              });
}

NodeId Tape::sub(NodeId a, NodeId b) {
  Matrix out = gtx::sub(nodes_[a].value, nodes_[b].value);
  const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [a, b](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate(grads, a, g);
                if (t.needs_grad(b)) accumulate_scaled(grads, b, g, -1.0);
              });
}

NodeId Tape::add_rowvec(NodeId x, NodeId v) {
  const Matrix& xm = nodes_[x].value;
  const Matrix& vm = nodes_[v].value;
  if (vm.rows() != 1 || vm.cols() != xm.cols())
    throw std::invalid_argument("add_rowvec: v must be 1 x cols(x)");
  Matrix out = xm;
  for (int i = 0; i < out.rows(); ++i) {
    double* r = out.row(i);
    for (int j = 0; j < out.cols(); ++j) r[j] += vm(0, j);
  }
  const bool ng = nodes_[x].needs_grad || nodes_[v].needs_grad;
  return push(std::move(out), ng,
              [x, v](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(x)) accumulate(grads, x, g);
                if (t.needs_grad(v)) {
                  Matrix gv(1, g.cols());
                  for (int i = 0; i < g.rows(); ++i)
                    for (int j = 0; j < g.cols(); ++j) gv(0, j) += g(i, j);
                  accumulate(grads, v, gv);
                }
              });
}

NodeId Tape::hadamard(NodeId a, NodeId b) {
  Matrix out = gtx::hadamard(nodes_[a].value, nodes_[b].value);
  const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [a, b](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate(grads, a, gtx::hadamard(g, t.value(b)));
                if (t.needs_grad(b)) accumulate(grads, b, gtx::hadamard(g, t.value(a)));
              });
}

NodeId Tape::scale(NodeId a, double s) {
  Matrix out = gtx::scale(nodes_[a].value, s);
  return push(std::move(out), nodes_[a].needs_grad,
              [a, s](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate_scaled(grads, a, g, s);
              });
}

NodeId Tape::scale_by_node(NodeId a, NodeId s) {
  const Matrix& sm = nodes_[s].value;
  if (sm.rows() != 1 || sm.cols() != 1) throw std::invalid_argument("scale_by_node: s must be 1x1");
  Matrix out = gtx::scale(nodes_[a].value, sm(0, 0));
  const bool ng = nodes_[a].needs_grad || nodes_[s].needs_grad;
  return push(std::move(out), ng,
              [a, s](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate_scaled(grads, a, g, t.value(s)(0, 0));
                if (t.needs_grad(s)) {
                  double dot = 0.0;
                  const double* gd = g.data();
                  const double* ad = t.value(a).data();
                  for (size_t i = 0; i < g.size(); ++i) dot += gd[i] * ad[i];
                  accumulate(grads, s, Matrix{{dot}});
                }
              });
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  Matrix out = gtx::matmul(nodes_[a].value, nodes_[b].value);
  const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [a, b](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (t.needs_grad(a)) accumulate(grads, a, gtx::matmul_nt(g, t.value(b)));
                if (t.needs_grad(b)) accumulate(grads, b, gtx::matmul_tn(t.value(a), g));
              });
}

NodeId Tape::matmul_nt(NodeId a, NodeId b) {
  Matrix out = gtx::matmul_nt(nodes_[a].value, nodes_[b].value);
  const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [a, b](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                // C = A B^T: dA = G B, dB = G^T A
                if (t.needs_grad(a)) accumulate(grads, a, gtx::matmul(g, t.value(b)));
                if (t.needs_grad(b)) accumulate(grads, b, gtx::matmul_tn(g, t.value(a)));
              });
}

NodeId Tape::row_softmax(NodeId a) {
  Matrix out = gtx::row_softmax(nodes_[a].value);
  const NodeId self = static_cast<NodeId>(nodes_.size());
  return push(std::move(out), nodes_[a].needs_grad,
              [a, self](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& y = t.value(self);
                Matrix gx(y.rows(), y.cols());
                for (int i = 0; i < y.rows(); ++i) {
                  const double* yi = y.row(i);
                  const double* gi = g.row(i);
                  double dot = 0.0;
                  for (int j = 0; j < y.cols(); ++j) dot += gi[j] * yi[j];
                  double* o = gx.row(i);
                  for (int j = 0; j < y.cols(); ++j) o[j] = yi[j] * (gi[j] - dot);
                }
                accumulate(grads, a, gx);
              });
}

NodeId Tape::layer_norm(NodeId x, NodeId gain, NodeId bias, double eps) {
  const Matrix& xm = nodes_[x].value;
  const Matrix& gm = nodes_[gain].value;
  const Matrix& bm = nodes_[bias].value;
  const int d = xm.cols();
  if (gm.rows() != 1 || gm.cols() != d || bm.rows() != 1 || bm.cols() != d)
    throw std::invalid_argument("layer_norm: gain/bias must be 1 x cols(x)");

  Matrix xhat(xm.rows(), d);
  std::vector<double> inv_std(xm.rows());
  Matrix out(xm.rows(), d);
  for (int i = 0; i < xm.rows(); ++i) {
    const double* xi = xm.row(i);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += xi[j];
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) {
      const double c = xi[j] - mean;
      var += c * c;
    }
    var /= d;
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    double* h = xhat.row(i);
    double* o = out.row(i);
    for (int j = 0; j < d; ++j) {
      h[j] = (xi[j] - mean) * inv_std[i];
      o[j] = h[j] * gm(0, j) + bm(0, j);
    }
  }
  const bool ng = nodes_[x].needs_grad || nodes_[gain].needs_grad || nodes_[bias].needs_grad;
  return push(std::move(out), ng,
              [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                  const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                const int rows = xhat.rows(), d = xhat.cols();
                if (t.needs_grad(bias)) {
                  Matrix gb(1, d);
                  for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < d; ++j) gb(0, j) += g(i, j);
                  accumulate(grads, bias, gb);
                }
                if (t.needs_grad(gain)) {
                  Matrix gg(1, d);
                  for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < d; ++j) gg(0, j) += g(i, j) * xhat(i, j);
                  accumulate(grads, gain, gg);
                }
                if (t.needs_grad(x)) {
                  const Matrix& gm2 = t.value(gain);
                  Matrix gx(rows, d);
                  for (int i = 0; i < rows; ++i) {
                    double m1 = 0.0, m2 = 0.0;
                    for (int j = 0; j < d; ++j) {
                      const double dh = g(i, j) * gm2(0, j);
                      m1 += dh;
                      m2 += dh * xhat(i, j);
                    }
                    m1 /= d;
                    m2 /= d;
                    for (int j = 0; j < d; ++j) {
                      const double dh = g(i, j) * gm2(0, j);
                      gx(i, j) = inv_std[i] * (dh - m1 - xhat(i, j) * m2);
                    }
                  }
                  accumulate(grads, x, gx);
                }
              });
}

NodeId Tape::relu(NodeId a) {
  Matrix out = gtx::relu(nodes_[a].value);
  return push(std::move(out), nodes_[a].needs_grad,
              [a](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                Matrix gx = g;
                double* gd = gx.data();
                const double* xd = x.data();
                for (size_t i = 0; i < gx.size(); ++i)
                  if (xd[i] <= 0.0) gd[i] = 0.0;
                accumulate(grads, a, gx);
              });
}

NodeId Tape::gelu(NodeId a) {
  Matrix out = gtx::gelu(nodes_[a].value);
  return push(std::move(out), nodes_[a].needs_grad,
              [a](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                Matrix gx = g;
                double* gd = gx.data();
                const double* xd = x.data();
                for (size_t i = 0; i < gx.size(); ++i) {
                  const double cdf = 0.5 * (1.0 + std::erf(xd[i] * M_SQRT1_2));
                  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xd[i] * xd[i]);
                  gd[i] *= cdf + xd[i] * pdf;
                }
                accumulate(grads, a, gx);
              });
}

NodeId Tape::leaky_relu(NodeId a, double slope) {
  Matrix out = nodes_[a].value;
  double* od = out.data();
  for (size_t i = 0; i < out.size(); ++i)
    if (od[i] < 0.0) od[i] *= slope;
  return push(std::move(out), nodes_[a].needs_grad,
              [a, slope](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                Matrix gx = g;
                double* gd = gx.data();
                const double* xd = x.data();
                for (size_t i = 0; i < gx.size(); ++i)
                  if (xd[i] < 0.0) gd[i] *= slope;
                accumulate(grads, a, gx);
              });
}

NodeId Tape::abs(NodeId a) {
  Matrix out = nodes_[a].value;
  double* od = out.data();
  for (size_t i = 0; i < out.size(); ++i) od[i] = std::fabs(od[i]);
  return push(std::move(out), nodes_[a].needs_grad,
              [a](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                Matrix gx = g;
                double* gd = gx.data();
                const double* xd = x.data();
                for (size_t i = 0; i < gx.size(); ++i)
                  gd[i] *= xd[i] > 0.0 ? 1.0 : (xd[i] < 0.0 ? -1.0 : 0.0);
                accumulate(grads, a, gx);
              });
}

NodeId Tape::masked_fill(NodeId a, const Matrix& mask, double fill) {
  const Matrix& x = nodes_[a].value;
  if (!x.same_shape(mask)) throw std::invalid_argument("masked_fill: mask shape mismatch");
  Matrix out = x;
  double* od = out.data();
  const double* md = mask.data();
  for (size_t i = 0; i < out.size(); ++i)
    if (md[i] == 0.0) od[i] = fill;
  return push(std::move(out), nodes_[a].needs_grad,
              [a, mask](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                accumulate(grads, a, gtx::hadamard(g, mask));
              });
}

NodeId Tape::slice_cols(NodeId a, int c0, int c1) {
  const Matrix& x = nodes_[a].value;
  if (c0 < 0 || c1 > x.cols() || c0 >= c1) throw std::invalid_argument("slice_cols: bad range");
  Matrix out(x.rows(), c1 - c0);
  for (int i = 0; i < x.rows(); ++i)
    for (int j = c0; j < c1; ++j) out(i, j - c0) = x(i, j);
  return push(std::move(out), nodes_[a].needs_grad,
              [a, c0, c1](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                Matrix gx(x.rows(), x.cols());
                for (int i = 0; i < g.rows(); ++i)
                  for (int j = c0; j < c1; ++j) gx(i, j) = g(i, j - c0);
                accumulate(grads, a, gx);
              });
}

NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
  const int rows = nodes_[parts[0]].value.rows();
  int cols = 0;
  bool ng = false;
  for (NodeId p : parts) {
    if (nodes_[p].value.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += nodes_[p].value.cols();
    ng = ng || nodes_[p].needs_grad;
  }
  Matrix out(rows, cols);
  int off = 0;
  for (NodeId p : parts) {
    const Matrix& x = nodes_[p].value;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < x.cols(); ++j) out(i, off + j) = x(i, j);
    off += x.cols();
  }
  return push(std::move(out), ng,
              [parts](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                int off = 0;
                for (NodeId p : parts) {
                  const int w = t.value(p).cols();
                  if (t.needs_grad(p)) {
                    Matrix gp(g.rows(), w);
                    for (int i = 0; i < g.rows(); ++i)
                      for (int j = 0; j < w; ++j) gp(i, j) = g(i, off + j);
                    accumulate(grads, p, gp);
                  }
                  off += w;
                }
              });
}

NodeId Tape::reshape(NodeId a, int rows, int cols) {
  const Matrix& x = nodes_[a].value;
  if (static_cast<size_t>(rows) * cols != x.size())
    throw std::invalid_argument("reshape: element count mismatch");
  Matrix out(rows, cols, x.vec());
  return push(std::move(out), nodes_[a].needs_grad,
              [a](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                accumulate(grads, a, Matrix(x.rows(), x.cols(), g.vec()));
              });
}

NodeId Tape::sum_all(NodeId a) {
  const Matrix& x = nodes_[a].value;
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  return push(Matrix{{s}}, nodes_[a].needs_grad,
              [a](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                accumulate(grads, a, Matrix::filled(x.rows(), x.cols(), g(0, 0)));
              });
}

NodeId Tape::mean_all(NodeId a) {
  const Matrix& x = nodes_[a].value;
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  const double inv = 1.0 / static_cast<double>(x.size());
  return push(Matrix{{s * inv}}, nodes_[a].needs_grad,
              [a, inv](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(a)) return;
                const Matrix& x = t.value(a);
                accumulate(grads, a, Matrix::filled(x.rows(), x.cols(), g(0, 0) * inv));
              });
}

NodeId Tape::bce_logits(NodeId logits, const Matrix& targets) {
  const Matrix& z = nodes_[logits].value;
  if (!z.same_shape(targets)) throw std::invalid_argument("bce_logits: target shape mismatch");
  Matrix out(z.rows(), z.cols());
  for (size_t i = 0; i < z.size(); ++i) {
    const double zi = z.data()[i], yi = targets.data()[i];
    out.data()[i] = std::max(zi, 0.0) - zi * yi + std::log1p(std::exp(-std::fabs(zi)));
  }
  return push(std::move(out), nodes_[logits].needs_grad,
              [logits, targets](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(logits)) return;
                const Matrix& z = t.value(logits);
                Matrix gl = g;
                for (size_t i = 0; i < z.size(); ++i) {
                  const double sig = 1.0 / (1.0 + std::exp(-z.data()[i]));
                  gl.data()[i] *= sig - targets.data()[i];
                }
                accumulate(grads, logits, gl);
              });
}

NodeId Tape::ce_logits(NodeId logits, const Matrix& onehot) {
  const Matrix& z = nodes_[logits].value;
  if (!z.same_shape(onehot)) throw std::invalid_argument("ce_logits: one-hot shape mismatch");
  Matrix out(z.rows(), 1);
  for (int i = 0; i < z.rows(); ++i) {
    const double* zi = z.row(i);
    double mx = zi[0];
    for (int j = 1; j < z.cols(); ++j) mx = std::max(mx, zi[j]);
    double lse = 0.0, picked = 0.0;
    for (int j = 0; j < z.cols(); ++j) {
      lse += std::exp(zi[j] - mx);
      picked += onehot(i, j) * zi[j];
    }
    out(i, 0) = mx + std::log(lse) - picked;
  }
  return push(std::move(out), nodes_[logits].needs_grad,
              [logits, onehot](const Matrix& g, const Tape& t, std::vector<Matrix>& grads) {
                if (!t.needs_grad(logits)) return;
                const Matrix& z = t.value(logits);
                Matrix p = gtx::row_softmax(z);
                Matrix gl(z.rows(), z.cols());
                for (int i = 0; i < z.rows(); ++i)
                  for (int j = 0; j < z.cols(); ++j)
                    gl(i, j) = g(i, 0) * (p(i, j) - onehot(i, j));
                accumulate(grads, logits, gl);
              });
}

std::unordered_map<NodeId, Matrix> Tape::backward(NodeId seed) const {
  const Matrix& sv = nodes_[seed].value;
  if (sv.rows() != 1 || sv.cols() != 1)
    throw std::invalid_argument("backward: seed node must be scalar (1x1)");

  std::vector<Matrix> grads(nodes_.size());
  grads[seed] = Matrix{{1.0}};
  for (NodeId i = seed; i >= 0; --i) {
    if (grads[i].empty() || !nodes_[i].back) continue;
    nodes_[i].back(grads[i], *this, grads);
  }

  std::unordered_map<NodeId, Matrix> out;
  out.reserve(leaves_.size());
  for (NodeId l : leaves_) {
    if (l <= seed && !grads[l].empty())
      out.emplace(l, std::move(grads[l]));
    else
      out.emplace(l, Matrix(nodes_[l].value.rows(), nodes_[l].value.cols()));
  }
  return out;
}

}  // namespace gtx
