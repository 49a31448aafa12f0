#include <cmath>

#include "doctest.h"
#include "graphtx/optim.hpp"
#include "test_util.hpp"

using namespace gtx;
using gtxtest::random_matrix;

TEST_SUITE_BEGIN("optim");

TEST_CASE("lr schedule: ramp, peak at warmup, zero at the endpoint") {
  LrSchedule s{2e-4, 40000, 1000000};
  CHECK(lr_at(0, s) == 0.0);
  CHECK(lr_at(20000, s) == doctest::Approx(1e-4));
  CHECK(lr_at(40000, s) == doctest::Approx(2e-4));
  CHECK(lr_at(520000, s) == doctest::Approx(1e-4));
  CHECK(lr_at(1000000, s) == 0.0);
  CHECK(lr_at(2000000, s) == 0.0);
}

TEST_CASE("lr schedule with warmup beyond max steps stays on the ramp") {
  LrSchedule s{2e-4, 40000, 3000};
  CHECK(lr_at(1500, s) == doctest::Approx(2e-4 * 1500.0 / 40000.0));
  CHECK(lr_at(3000, s) == 0.0);
}

TEST_CASE("first Adam step approximates a sign step") {
  std::vector<Matrix> params{Matrix{{1.0, -2.0, 0.5}}};
  std::vector<Matrix> grads{Matrix{{0.3, -0.7, 0.01}}};
  TrainState st = TrainState::init(params);
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  const double lr = 1e-3;
  std::vector<Matrix> before = params;
  adam_step(st, params, grads, cfg, lr);
  for (int j = 0; j < 3; ++j) {
    const double g = grads[0](0, j);
    const double want = before[0](0, j) - lr * g / (std::fabs(g) + cfg.eps);
    CHECK(params[0](0, j) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("zero gradients leave only the decoupled decay") {
  std::vector<Matrix> params{Matrix{{2.0, -4.0}}};
  std::vector<Matrix> grads{Matrix(1, 2)};
  TrainState st = TrainState::init(params);
  AdamConfig cfg;  // wd = 1e-3
  adam_step(st, params, grads, cfg, 0.1);
  CHECK(params[0](0, 0) == doctest::Approx(2.0 * (1.0 - 0.1 * 1e-3)).epsilon(1e-15));
  CHECK(params[0](0, 1) == doctest::Approx(-4.0 * (1.0 - 0.1 * 1e-3)).epsilon(1e-15));
}

TEST_CASE("ten-step trace on a scalar quadratic matches the scripted recurrence") {
  // minimize f(w) = 0.5 w^2, grad = w, without decay or clipping
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  cfg.clip_norm = 0.0;
  const double lr = 0.05;

  std::vector<Matrix> params{Matrix{{1.3}}};
  TrainState st = TrainState::init(params);

  // independent scripted recurrence
  double w = 1.3, m = 0.0, v = 0.0;
  for (int step = 1; step <= 10; ++step) {
    const double g = w;
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mhat = m / (1 - std::pow(cfg.beta1, step));
    const double vhat = v / (1 - std::pow(cfg.beta2, step));
    w -= lr * mhat / (std::sqrt(vhat) + cfg.eps);

    std::vector<Matrix> grads{Matrix{{params[0](0, 0)}}};
    adam_step(st, params, grads, cfg, lr);
    CHECK(std::fabs(params[0](0, 0) - w) < 1e-12);
  }
}

TEST_CASE("global-norm clipping rescales all gradients together") {
  std::vector<Matrix> grads{Matrix{{3.0, 0.0}}, Matrix{{0.0, 4.0}}};
  CHECK(global_grad_norm(grads) == doctest::Approx(5.0));
  clip_by_global_norm(grads, 2.5);
  CHECK(global_grad_norm(grads) == doctest::Approx(2.5));
  CHECK(grads[0](0, 0) == doctest::Approx(1.5));
  CHECK(grads[1](0, 1) == doctest::Approx(2.0));

  std::vector<Matrix> small{Matrix{{0.1}}};
  clip_by_global_norm(small, 5.0);  // under the limit: untouched
  CHECK(small[0](0, 0) == 0.1);
}

TEST_CASE("clipping is applied before the Adam update") {
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  cfg.clip_norm = 1.0;
  std::vector<Matrix> params{Matrix{{0.0}}};
  std::vector<Matrix> grads{Matrix{{100.0}}};
  TrainState st = TrainState::init(params);
  adam_step(st, params, grads, cfg, 1e-2);
  // clipped gradient is 1.0, so the first step is ~ -lr * sign
  CHECK(params[0](0, 0) == doctest::Approx(-1e-2).epsilon(1e-6));
}

TEST_SUITE_END();
