#pragma once

#include <Eigen/Dense>

namespace sbdd::nn {

// Utilities over any parameter bundle exposing visit(f), where f receives
// each dense Eigen tensor in a fixed order.

template <class P>
Eigen::Index parameter_count(const P& p) {
  Eigen::Index n = 0;
  p.visit([&](const auto& t) { n += t.size(); });
  return n;
}

template <class P>
Eigen::VectorXd flatten(const P& p) {
  Eigen::VectorXd flat(parameter_count(p));
  Eigen::Index at = 0;
  p.visit([&](const auto& t) {
    flat.segment(at, t.size()) = t.reshaped();
    at += t.size();
  });
  return flat;
}

/// Copies `flat` into `p`; sizes must already match.
template <class P>
void unflatten(P& p, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  Eigen::Index at = 0;
  p.visit([&](auto& t) {
    t.reshaped() = flat.segment(at, t.size());
    at += t.size();
  });
}

template <class P>
void set_zero(P& p) {
  p.visit([](auto& t) { t.setZero(); });
}

}  // namespace sbdd::nn
