#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "sbdd/error.hpp"

namespace sbdd::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

/// One bias-corrected Adam update of a flat parameter vector.
inline void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
                      const AdamConfig& cfg = {}) {
  if (grads.size() != params.size()) throw ValidationError("adam_step: gradient size mismatch");
  if (state.m.size() == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  if (state.m.size() != params.size()) throw ValidationError("adam_step: optimizer state size mismatch");
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= cfg.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

}  // namespace sbdd::nn
