#pragma once

#include <vector>

#include <Eigen/Core>

#include "sbdd/expressivity/refine.hpp"
#include "sbdd/nn/dense.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::expressivity {

/// Reference locally unordered GNN with sum aggregation:
///   m_uv = phi_l([h_u, e_uv (, d_uv)]),  h_v' = combine_l([h_v, sum_u m_uv]).
/// Tokens are embedded by seeded Gaussian vectors; LU3D messages also see
/// the edge length rounded to 1e-6.
struct LuGnn {
  Mode mode = Mode::LU;
  int hidden = 8;
  std::uint64_t token_seed = 0;
  std::vector<nn::DenseParams<double>> phi;
  std::vector<nn::DenseParams<double>> combine;
};

LuGnn make_lu_gnn(Rng& rng, int layers, int hidden, Mode mode);

/// Node embeddings after each layer, layer 0 being the token embedding;
/// each matrix is hidden x n.
std::vector<Eigen::MatrixXd> lu_gnn_embeddings(const LuGnn& net, const FeaturedGraph& g);

/// Per layer, the largest |h1(u) - h2(v)| over the pairs (u, v).
std::vector<double> paired_deviation(const LuGnn& net, const FeaturedGraph& g1, const FeaturedGraph& g2,
                                     const std::vector<std::pair<int, int>>& pairing);

}  // namespace sbdd::expressivity
