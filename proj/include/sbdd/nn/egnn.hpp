#pragma once

#include <array>
#include <vector>

#include "sbdd/nn/dense.hpp"

namespace sbdd::nn {

template <class Scalar>
using Coords3 = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

/// Directed message list: message k flows from src[k] to dst[k]. Undirected
/// graphs list each edge in both directions.
struct EdgeIndex {
  std::vector<int> src;
  std::vector<int> dst;

  std::size_t size() const noexcept { return src.size(); }
};

/// One equivariant message-passing layer:
///   m_uv = phi_e(h_u, h_v, |x_u - x_v|, e_uv)
///   x_v' = x_v + C_v * sum_u (x_v - x_u) phi_x(m_uv)
///   h_v' = phi_h(h_v, sum_u m_uv)
/// with sums over graph neighbours and C_v = 1 / |N(v)|.
template <class Scalar>
struct EgnnLayerParams {
  DenseParams<Scalar> phi_e;
  DenseParams<Scalar> phi_x;
  DenseParams<Scalar> phi_h;

  Eigen::Index hidden() const { return phi_h.out_dim(); }
  Eigen::Index edge_dim() const { return phi_e.in_dim() - 2 * hidden() - 1; }

  template <class F>
  void visit(F&& f) {
    phi_e.visit(f);
    phi_x.visit(f);
    phi_h.visit(f);
  }
  template <class F>
  void visit(F&& f) const {
    phi_e.visit(f);
    phi_x.visit(f);
    phi_h.visit(f);
  }
};

/// phi_e: [2h+1+edge_dim] -> h -> h (SiLU, SiLU); phi_x: h -> h -> 1 (SiLU,
/// identity); phi_h: [2h] -> h -> h (SiLU, identity).
template <class Scalar = double>
EgnnLayerParams<Scalar> make_egnn_layer(int hidden, int edge_dim, Rng& rng) {
  using A = Activation;
  const std::array<int, 3> e_dims{2 * hidden + 1 + edge_dim, hidden, hidden};
  const std::array<int, 3> x_dims{hidden, hidden, 1};
  const std::array<int, 3> h_dims{2 * hidden, hidden, hidden};
  const std::array<A, 2> e_acts{A::SiLU, A::SiLU};
  const std::array<A, 2> lin_out{A::SiLU, A::Identity};
  EgnnLayerParams<Scalar> p;
  p.phi_e = make_mlp<Scalar>(e_dims, e_acts, rng);
  p.phi_x = make_mlp<Scalar>(x_dims, lin_out, rng);
  p.phi_h = make_mlp<Scalar>(h_dims, lin_out, rng);
  // Small coordinate steps at initialization keep deep stacks stable.
  p.phi_x.layers.back().weight *= Scalar(1e-3);
  return p;
}

template <class Scalar>
struct EgnnTape {
  Matrix<Scalar> h;
  Coords3<Scalar> x;
  Coords3<Scalar> diff;  // x_dst - x_src per message
  Vector<Scalar> dist;
  Vector<Scalar> coef;  // C_v per node
  Matrix<Scalar> messages;
  Vector<Scalar> weights;  // phi_x per message
  DenseTape<Scalar> phi_e, phi_x, phi_h;
};

template <class Scalar>
struct EgnnState {
  Matrix<Scalar> h;
  Coords3<Scalar> x;
};

template <class Scalar>
EgnnState<Scalar> egnn_layer(const EgnnLayerParams<Scalar>& p, const Matrix<Scalar>& h, const Coords3<Scalar>& x,
                             const EdgeIndex& edges, const Matrix<Scalar>& edge_features = {},
                             EgnnTape<Scalar>* tape = nullptr) {
  const Eigen::Index n = h.cols();
  const Eigen::Index hid = p.hidden();
  const auto m = static_cast<Eigen::Index>(edges.size());
  const Eigen::Index edim = p.edge_dim();
  if (x.cols() != n) throw ValidationError("egnn_layer: embedding and coordinate counts differ");
  if (h.rows() != hid) throw ValidationError("egnn_layer: embedding width does not match layer");
  if (edges.dst.size() != edges.src.size()) throw ValidationError("egnn_layer: malformed edge index");
  if (edim > 0 && (edge_features.rows() != edim || edge_features.cols() != m)) {
    throw ValidationError("egnn_layer: edge feature shape mismatch");
  }
  if (!h.allFinite() || !x.allFinite()) throw NumericError("egnn_layer: non-finite input");

  Matrix<Scalar> ein(2 * hid + 1 + edim, m);
  Coords3<Scalar> diff(3, m);
  Vector<Scalar> dist(m);
  Vector<Scalar> coef = Vector<Scalar>::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int u = edges.src[static_cast<std::size_t>(k)];
    const int v = edges.dst[static_cast<std::size_t>(k)];
    if (u < 0 || v < 0 || u >= n || v >= n) throw ValidationError("egnn_layer: edge references a missing node");
    diff.col(k) = x.col(v) - x.col(u);
    dist[k] = diff.col(k).norm();
    ein.col(k).head(hid) = h.col(u);
    ein.col(k).segment(hid, hid) = h.col(v);
    ein(2 * hid, k) = dist[k];
    if (edim > 0) ein.col(k).tail(edim) = edge_features.col(k);
    coef[v] += Scalar(1);
  }
  for (Eigen::Index v = 0; v < n; ++v) coef[v] = coef[v] > Scalar(0) ? Scalar(1) / coef[v] : Scalar(0);

  DenseTape<Scalar>* te = tape ? &tape->phi_e : nullptr;
  DenseTape<Scalar>* tx = tape ? &tape->phi_x : nullptr;
  DenseTape<Scalar>* th = tape ? &tape->phi_h : nullptr;
  Matrix<Scalar> msg = mlp_forward(p.phi_e, ein, te);
  Vector<Scalar> w = mlp_forward(p.phi_x, msg, tx).transpose();

  EgnnState<Scalar> out{Matrix<Scalar>(hid, n), x};
  Matrix<Scalar> hin(2 * hid, n);
  hin.topRows(hid) = h;
  hin.bottomRows(hid).setZero();
  for (Eigen::Index k = 0; k < m; ++k) {
    const int v = edges.dst[static_cast<std::size_t>(k)];
    out.x.col(v) += coef[v] * w[k] * diff.col(k);
    hin.col(v).tail(hid) += msg.col(k);
  }
  out.h = mlp_forward(p.phi_h, hin, th);

  if (tape) {
    tape->h = h;
    tape->x = x;
    tape->diff = std::move(diff);
    tape->dist = std::move(dist);
    tape->coef = std::move(coef);
    tape->messages = std::move(msg);
    tape->weights = std::move(w);
  }
  return out;
}

/// Reverse pass of egnn_layer. Accumulates parameter gradients into
/// `grads` and returns gradients with respect to the layer inputs.
template <class Scalar>
EgnnState<Scalar> egnn_layer_backward(const EgnnLayerParams<Scalar>& p, const EgnnTape<Scalar>& tape,
                                      const EdgeIndex& edges, const Matrix<Scalar>& dh_out,
                                      const Coords3<Scalar>& dx_out, EgnnLayerParams<Scalar>& grads) {
  const Eigen::Index hid = p.hidden();
  const auto m = static_cast<Eigen::Index>(edges.size());
  if (tape.messages.cols() != m) throw ValidationError("egnn_layer_backward: tape does not match edges");

  const Matrix<Scalar> dhin = mlp_backward(p.phi_h, tape.phi_h, dh_out, grads.phi_h);
  EgnnState<Scalar> din{dhin.topRows(hid), dx_out};

  Matrix<Scalar> dmsg(hid, m);
  Matrix<Scalar> dw(1, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int u = edges.src[static_cast<std::size_t>(k)];
    const int v = edges.dst[static_cast<std::size_t>(k)];
    dmsg.col(k) = dhin.col(v).tail(hid);
    const Scalar c = tape.coef[v];
    dw(0, k) = c * tape.diff.col(k).dot(dx_out.col(v));
    const Eigen::Matrix<Scalar, 3, 1> g = c * tape.weights[k] * dx_out.col(v);
    din.x.col(v) += g;
    din.x.col(u) -= g;
  }
  dmsg += mlp_backward(p.phi_x, tape.phi_x, dw, grads.phi_x);
  const Matrix<Scalar> dein = mlp_backward(p.phi_e, tape.phi_e, dmsg, grads.phi_e);
  for (Eigen::Index k = 0; k < m; ++k) {
    const int u = edges.src[static_cast<std::size_t>(k)];
    const int v = edges.dst[static_cast<std::size_t>(k)];
    din.h.col(u) += dein.col(k).head(hid);
    din.h.col(v) += dein.col(k).segment(hid, hid);
    const Scalar d = tape.dist[k];
    if (d > Scalar(0)) {
      // dist = |x_v - x_u|
      const Eigen::Matrix<Scalar, 3, 1> g = (dein(2 * hid, k) / d) * tape.diff.col(k);
      din.x.col(v) += g;
      din.x.col(u) -= g;
    }
  }
  return din;
}

}  // namespace sbdd::nn
