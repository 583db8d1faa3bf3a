#include "sbdd/affinity/scorer.hpp"

#include <array>
#include <cmath>

#include "sbdd/error.hpp"

namespace sbdd::affinity {

using nn::Activation;

namespace {

nn::DenseParams<double> make_embedding(Rng& rng) {
  const std::array<int, 2> dims{static_cast<int>(kAminoAcids.size()), kHiddenDim};
  const std::array<Activation, 1> acts{Activation::Identity};
  return nn::make_mlp<double>(dims, acts, rng);
}

}  // namespace

ScorerParams make_scorer(Rng& rng, int n_layers, int head_hidden, int head_layers) {
  ScorerParams p;
  p.embed = make_embedding(rng);
  for (int l = 0; l < n_layers; ++l) p.layers.push_back(nn::make_egnn_layer<double>(kHiddenDim, 0, rng));
  std::vector<int> dims{kHiddenDim + 4};
  std::vector<Activation> acts;
  for (int l = 0; l + 1 < head_layers; ++l) {
    dims.push_back(head_hidden);
    acts.push_back(Activation::ReLU);
  }
  dims.push_back(1);
  acts.push_back(Activation::Identity);
  p.head = nn::make_mlp<double>(dims, acts, rng);
  return p;
}

nn::EgnnState<double> run_trunk(const nn::DenseParams<double>& embed,
                                const std::vector<nn::EgnnLayerParams<double>>& layers, const PocketGraph& g,
                                PocketTape* tape) {
  if (g.size() == 0) throw ValidationError("empty pocket graph");
  if (tape) tape->layers.resize(layers.size());
  nn::EgnnState<double> state{nn::mlp_forward(embed, Eigen::MatrixXd(g.one_hot()), tape ? &tape->embed : nullptr),
                              g.coords() * kCoordScale};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    state = nn::egnn_layer(layers[l], state.h, state.x, g.edges, {}, tape ? &tape->layers[l] : nullptr);
  }
  if (tape) tape->final_state = state;
  return state;
}

void trunk_backward(const nn::DenseParams<double>& embed, const std::vector<nn::EgnnLayerParams<double>>& layers,
                    const PocketGraph& g, const PocketTape& tape, const Eigen::MatrixXd& dh_final,
                    const nn::Coords3<double>& dx_final, nn::DenseParams<double>& grad_embed,
                    std::vector<nn::EgnnLayerParams<double>>& grad_layers) {
  nn::EgnnState<double> d{dh_final, dx_final};
  for (std::size_t l = layers.size(); l-- > 0;) {
    d = nn::egnn_layer_backward(layers[l], tape.layers[l], g.edges, d.h, d.x, grad_layers[l]);
  }
  nn::mlp_backward(embed, tape.embed, d.h, grad_embed);
}

Eigen::VectorXd encode_pocket(const ScorerParams& p, const PocketGraph& g) {
  return run_trunk(p.embed, p.layers, g).h.rowwise().mean();
}

double score_embedded(const ScorerParams& p, const Eigen::VectorXd& pocket_embedding,
                      const features::StructuralFeatures& f) {
  Eigen::VectorXd input(pocket_embedding.size() + 4);
  input << pocket_embedding, features::standardize(f, p.stats);
  const double s = nn::mlp_forward(p.head, input)[0];
  if (!std::isfinite(s)) throw NumericError("affinity score is not finite");
  return s;
}

double score(const ScorerParams& p, const features::StructuralFeatures& f, const PocketGraph& g) {
  return score_embedded(p, encode_pocket(p, g), f);
}

std::vector<double> score_batch(const ScorerParams& p, std::span<const features::StructuralFeatures> features,
                                const PocketGraph& g) {
  const Eigen::VectorXd embedding = encode_pocket(p, g);
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(score_embedded(p, embedding, f));
  return out;
}

}  // namespace sbdd::affinity
