#pragma once

#include <span>
#include <vector>

#include "sbdd/affinity/pocket.hpp"
#include "sbdd/features.hpp"
#include "sbdd/nn/egnn.hpp"

namespace sbdd::affinity {

inline constexpr int kHiddenDim = 16;

/// Residue coordinates enter the trunk in nanometres; the trunk state `x` is in those units.
inline constexpr double kCoordScale = 0.1;

/// Weights of the affinity surrogate: a residue-type embedding, three EGNN
/// layers pooled by mean, and a 5-layer ReLU head over the pocket embedding
/// concatenated with the standardized ligand features. `stats` is fitted
/// on training data and is not trainable.
struct ScorerParams {
  nn::DenseParams<double> embed;
  std::vector<nn::EgnnLayerParams<double>> layers;
  nn::DenseParams<double> head;
  features::FeatureStats stats;

  template <class F>
  void visit(F&& f) {
    embed.visit(f);
    for (auto& l : layers) l.visit(f);
    head.visit(f);
  }
  template <class F>
  void visit(F&& f) const {
    embed.visit(f);
    for (const auto& l : layers) l.visit(f);
    head.visit(f);
  }
};

ScorerParams make_scorer(Rng& rng, int n_layers = 3, int head_hidden = 50, int head_layers = 5);

/// Intermediate values of one pocket encoding, kept for the reverse pass.
struct PocketTape {
  nn::DenseTape<double> embed;
  std::vector<nn::EgnnTape<double>> layers;
  nn::EgnnState<double> final_state;
};

/// Shared EGNN trunk used by both the scorer and the centre-of-mass model.
nn::EgnnState<double> run_trunk(const nn::DenseParams<double>& embed,
                                const std::vector<nn::EgnnLayerParams<double>>& layers, const PocketGraph& g,
                                PocketTape* tape = nullptr);

/// Gradients of the trunk given gradients at its final state.
void trunk_backward(const nn::DenseParams<double>& embed, const std::vector<nn::EgnnLayerParams<double>>& layers,
                    const PocketGraph& g, const PocketTape& tape, const Eigen::MatrixXd& dh_final,
                    const nn::Coords3<double>& dx_final, nn::DenseParams<double>& grad_embed,
                    std::vector<nn::EgnnLayerParams<double>>& grad_layers);

/// Mean node embedding after the EGNN layers.
Eigen::VectorXd encode_pocket(const ScorerParams& p, const PocketGraph& g);

/// Head evaluation given a precomputed pocket embedding.
double score_embedded(const ScorerParams& p, const Eigen::VectorXd& pocket_embedding,
                      const features::StructuralFeatures& f);

/// Throws NumericError when the result is not finite.
double score(const ScorerParams& p, const features::StructuralFeatures& f, const PocketGraph& g);

/// Encodes the pocket once; element i equals score(p, features[i], g) bit
/// for bit.
std::vector<double> score_batch(const ScorerParams& p, std::span<const features::StructuralFeatures> features,
                                const PocketGraph& g);

/// Caches one pocket embedding for repeated scoring.
class PocketScorer {
 public:
  PocketScorer(const ScorerParams& p, const PocketGraph& g) : params_(&p), embedding_(encode_pocket(p, g)) {}

  double operator()(const features::StructuralFeatures& f) const { return score_embedded(*params_, embedding_, f); }
  const Eigen::VectorXd& embedding() const noexcept { return embedding_; }

 private:
  const ScorerParams* params_;
  Eigen::VectorXd embedding_;
};

}  // namespace sbdd::affinity
