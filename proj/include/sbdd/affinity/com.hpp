#pragma once

#include <vector>

#include "sbdd/affinity/pocket.hpp"
#include "sbdd/nn/egnn.hpp"

namespace sbdd::affinity {

/// Centre-of-mass predictor: residue embedding plus EGNN layers; the
/// prediction is the mean of the final coordinate embeddings.
struct ComParams {
  nn::DenseParams<double> embed;
  std::vector<nn::EgnnLayerParams<double>> layers;

  template <class F>
  void visit(F&& f) {
    embed.visit(f);
    for (auto& l : layers) l.visit(f);
  }
  template <class F>
  void visit(F&& f) const {
    embed.visit(f);
    for (const auto& l : layers) l.visit(f);
  }
};

ComParams make_com_model(Rng& rng, int n_layers = 4);

Eigen::Vector3d predict_com(const ComParams& p, const PocketGraph& g);

}  // namespace sbdd::affinity
