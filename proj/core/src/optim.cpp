#include "graphtx/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gtx {

TrainState TrainState::init(const std::vector<Matrix>& params) {
  TrainState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const auto& p : params) {
    s.m.emplace_back(p.rows(), p.cols());
    s.v.emplace_back(p.rows(), p.cols());
  }
  return s;
}

double global_grad_norm(const std::vector<Matrix>& grads) {
  double sq = 0.0;
  for (const auto& g : grads)
    for (size_t i = 0; i < g.size(); ++i) sq += g.data()[i] * g.data()[i];
  return std::sqrt(sq);
}

void clip_by_global_norm(std::vector<Matrix>& grads, double clip) {
  if (clip <= 0.0) return;
  const double norm = global_grad_norm(grads);
  if (norm <= clip) return;
  const double s = clip / norm;
  for (auto& g : grads)
    for (size_t i = 0; i < g.size(); ++i) g.data()[i] *= s;
}

void adam_step(TrainState& state, std::vector<Matrix>& params, std::vector<Matrix>& grads,
               const AdamConfig& cfg, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
  clip_by_global_norm(grads, cfg.clip_norm);
  state.step += 1;
  state.lr = lr;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t p = 0; p < params.size(); ++p) {
    if (!params[p].same_shape(grads[p]))
      throw std::invalid_argument("adam_step: gradient shape mismatch at parameter " +
                                  std::to_string(p));
    double* w = params[p].data();
    const double* g = grads[p].data();
    double* m = state.m[p].data();
    double* v = state.v[p].data();
    for (size_t i = 0; i < params[p].size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      const double decay = cfg.weight_decay * w[i];
      w[i] -= lr * (mhat / (std::sqrt(vhat) + cfg.eps) + decay);
    }
  }
}

double lr_at(long step, const LrSchedule& s) {
  if (step <= 0 || step >= s.max_steps) return 0.0;
  if (step <= s.warmup_steps)
    return s.peak * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  return s.peak * static_cast<double>(s.max_steps - step) /
         static_cast<double>(s.max_steps - s.warmup_steps);
}

}  // namespace gtx
