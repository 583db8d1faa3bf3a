#include "sbdd/affinity/com.hpp"

#include <array>

#include "sbdd/affinity/scorer.hpp"

namespace sbdd::affinity {

ComParams make_com_model(Rng& rng, int n_layers) {
  ComParams p;
  const std::array<int, 2> dims{static_cast<int>(kAminoAcids.size()), kHiddenDim};
  const std::array<nn::Activation, 1> acts{nn::Activation::Identity};
  p.embed = nn::make_mlp<double>(dims, acts, rng);
  for (int l = 0; l < n_layers; ++l) p.layers.push_back(nn::make_egnn_layer<double>(kHiddenDim, 0, rng));
  return p;
}

Eigen::Vector3d predict_com(const ComParams& p, const PocketGraph& g) {
  return run_trunk(p.embed, p.layers, g).x.rowwise().mean() / kCoordScale;
}

}  // namespace sbdd::affinity
