#pragma once

#include <vector>

#include "graphtx/matrix.hpp"

namespace gtx {

struct AdamConfig {
  double eps = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double weight_decay = 1e-3;  // decoupled
  double clip_norm = 5.0;      // global-norm clip, applied before the update
};

struct TrainState {
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  double lr = 0.0;

  static TrainState init(const std::vector<Matrix>& params);
};

double global_grad_norm(const std::vector<Matrix>& grads);

/// Scales all gradients by clip/norm when the global norm exceeds clip.
void clip_by_global_norm(std::vector<Matrix>& grads, double clip);

/// One bias-corrected Adam step with decoupled weight decay. Increments
/// state.step; gradients are clipped first.
void adam_step(TrainState& state, std::vector<Matrix>& params, std::vector<Matrix>& grads,
               const AdamConfig& cfg, double lr);

struct LrSchedule {
  double peak = 2e-4;
  long warmup_steps = 40000;
  long max_steps = 1000000;
};

/// Linear ramp 0 -> peak over the warmup, then linear decay to 0 at
/// max_steps. Steps at or past max_steps give 0; if warmup >= max_steps the
/// ramp branch covers the whole run.
double lr_at(long step, const LrSchedule& s);

}  // namespace gtx
