#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbdd/error.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::nn {

enum class Activation { Identity, ReLU, SiLU };

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out
  Activation activation = Activation::Identity;
};

/// Stack of affine layers, each followed by its activation. Batches are
/// column-major: one sample per column.
template <class Scalar>
struct DenseParams {
  std::vector<DenseLayer<Scalar>> layers;

  Eigen::Index in_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  Eigen::Index out_dim() const { return layers.empty() ? 0 : layers.back().weight.rows(); }

  template <class F>
  void visit(F&& f) {
    for (auto& l : layers) {
      f(l.weight);
      f(l.bias);
    }
  }
  template <class F>
  void visit(F&& f) const {
    for (const auto& l : layers) {
      f(l.weight);
      f(l.bias);
    }
  }
};

/// Per-layer inputs and pre-activations of one forward pass.
template <class Scalar>
struct DenseTape {
  std::vector<Matrix<Scalar>> inputs;
  std::vector<Matrix<Scalar>> pre;
};

namespace detail {

template <class Scalar>
Scalar sigmoid(Scalar z) {
  return Scalar(1) / (Scalar(1) + std::exp(-z));
}

template <class Derived>
auto activate(const Eigen::MatrixBase<Derived>& z, Activation a) -> typename Derived::PlainObject {
  using S = typename Derived::Scalar;
  switch (a) {
    case Activation::ReLU: return z.cwiseMax(S(0));
    case Activation::SiLU: return z.unaryExpr([](S v) { return v * sigmoid(v); });
    case Activation::Identity: break;
  }
  return z;
}

template <class Derived>
auto activation_grad(const Eigen::MatrixBase<Derived>& z, Activation a) -> typename Derived::PlainObject {
  using S = typename Derived::Scalar;
  switch (a) {
    case Activation::ReLU: return z.unaryExpr([](S v) { return v > S(0) ? S(1) : S(0); });
    case Activation::SiLU:
      return z.unaryExpr([](S v) {
        const S s = sigmoid(v);
        return s * (S(1) + v * (S(1) - s));
      });
    case Activation::Identity: break;
  }
  return Derived::PlainObject::Ones(z.rows(), z.cols());
}

}  // namespace detail

/// Glorot-uniform weights, zero biases. `dims` lists layer widths including
/// input and output; `acts` has one entry per layer.
template <class Scalar = double>
DenseParams<Scalar> make_mlp(std::span<const int> dims, std::span<const Activation> acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() + 1 != dims.size()) throw ValidationError("make_mlp: dims/activations mismatch");
  DenseParams<Scalar> p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l];
    const int out = dims[l + 1];
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer<Scalar> layer;
    layer.weight.resize(out, in);
    for (Eigen::Index c = 0; c < in; ++c) {
      for (Eigen::Index r = 0; r < out; ++r) layer.weight(r, c) = static_cast<Scalar>(rng.uniform(-a, a));
    }
    layer.bias = Vector<Scalar>::Zero(out);
    layer.activation = acts[l];
    p.layers.push_back(std::move(layer));
  }
  return p;
}

template <class Scalar>
DenseParams<Scalar> zeros_like(const DenseParams<Scalar>& p) {
  DenseParams<Scalar> z = p;
  z.visit([](auto& t) { t.setZero(); });
  return z;
}

/// Forward pass over a batch `x` (in_dim x batch). Records into `tape` when
/// given.
template <class Scalar>
Matrix<Scalar> mlp_forward(const DenseParams<Scalar>& p, const Matrix<Scalar>& x,
                           DenseTape<Scalar>* tape = nullptr) {
  if (x.rows() != p.in_dim()) {
    throw ValidationError("mlp_forward: input has " + std::to_string(x.rows()) + " rows, expected " +
                          std::to_string(p.in_dim()));
  }
  if (tape) {
    tape->inputs.clear();
    tape->pre.clear();
  }
  Matrix<Scalar> a = x;
  for (const auto& layer : p.layers) {
    Matrix<Scalar> z = layer.weight * a;
    z.colwise() += layer.bias;
    if (tape) {
      tape->inputs.push_back(std::move(a));
      a = detail::activate(z, layer.activation);
      tape->pre.push_back(std::move(z));
    } else {
      a = detail::activate(z, layer.activation);
    }
  }
  return a;
}

template <class Scalar>
Vector<Scalar> mlp_forward(const DenseParams<Scalar>& p, const Vector<Scalar>& x) {
  if (x.size() != p.in_dim()) {
    throw ValidationError("mlp_forward: input has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(p.in_dim()));
  }
  Vector<Scalar> a = x;
  for (const auto& layer : p.layers) {
    Vector<Scalar> z = layer.weight * a + layer.bias;
    a = detail::activate(z, layer.activation);
  }
  return a;
}

/// Reverse pass: accumulates parameter gradients into `grads` (same shape
/// as `p`) and returns the gradient with respect to the batch input.
template <class Scalar>
Matrix<Scalar> mlp_backward(const DenseParams<Scalar>& p, const DenseTape<Scalar>& tape,
                            const Matrix<Scalar>& dy, DenseParams<Scalar>& grads) {
  if (tape.pre.size() != p.layers.size()) throw ValidationError("mlp_backward: tape does not match parameters");
  if (dy.rows() != p.out_dim() || dy.cols() != tape.pre.back().cols()) {
    throw ValidationError("mlp_backward: output gradient shape mismatch");
  }
  Matrix<Scalar> g = dy;
  for (std::size_t k = p.layers.size(); k-- > 0;) {
    const auto& layer = p.layers[k];
    g.array() *= detail::activation_grad(tape.pre[k], layer.activation).array();
    grads.layers[k].weight.noalias() += g * tape.inputs[k].transpose();
    grads.layers[k].bias += g.rowwise().sum();
    g = layer.weight.transpose() * g;
  }
  return g;
}

}  // namespace sbdd::nn
