#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbdd/affinity/com.hpp"
#include "sbdd/affinity/scorer.hpp"
#include "sbdd/nn/adam.hpp"

namespace sbdd::affinity {

struct AffinityRecord {
  std::string pocket_id;
  std::string ligand_id;
  features::StructuralFeatures features;
  double label = 0.0;  // lower is stronger binding
};

struct TrainConfig {
  std::uint64_t seed = 0;
  double lr = 1e-3;
  int batch_size = 128;
  int max_steps = 10000;
  double split_fraction = 0.1;  // share of pockets held out for validation
  int eval_every = 50;
  int patience = 20;  // evaluations without improvement before stopping
};

struct TrainLogEntry {
  int step = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct ScorerTrainResult {
  ScorerParams params;
  std::vector<TrainLogEntry> log;
  std::vector<std::string> train_pockets;
  std::vector<std::string> val_pockets;
  double best_val_loss = 0.0;
  int best_step = 0;
  std::vector<std::string> warnings;
};

using PocketMap = std::map<std::string, PocketGraph>;

/// Partition of pocket ids into training and validation sets; at least one
/// pocket is held out when there are two or more.
std::pair<std::vector<std::string>, std::vector<std::string>> split_pockets(std::vector<std::string> ids,
                                                                            double val_fraction, Rng& rng);

/// Mean squared error and its gradient for a batch of records.
double scorer_loss_and_grad(const ScorerParams& p, std::span<const AffinityRecord* const> batch,
                            const PocketMap& pockets, ScorerParams* grad);

/// MSE training with Adam; returns the parameters with the best validation
/// loss seen. Throws ValidationError when there are no records or a record
/// references an unknown pocket.
ScorerTrainResult train_scorer(const std::vector<AffinityRecord>& records, const PocketMap& pockets,
                               const TrainConfig& cfg);

struct ComExample {
  PocketGraph pocket;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
};

struct ComTrainResult {
  ComParams params;
  std::vector<TrainLogEntry> log;  // losses are mean Euclidean errors, Angstrom
  double val_error = 0.0;
  int best_step = 0;
};

/// Mean Euclidean error and its gradient for a batch.
double com_loss_and_grad(const ComParams& p, std::span<const ComExample* const> batch, ComParams* grad);

ComTrainResult train_com(const std::vector<ComExample>& examples, const TrainConfig& cfg);

/// Mean predicted score per ligand size for one pocket.
struct SizePoint {
  int size = 0;
  double mean_score = 0.0;
  int count = 0;
};

/// Bins `templates` by node count and averages the prediction within each
/// bin listed in `size_grid`. Empty bins are skipped and reported in
/// `skipped` when given.
std::vector<SizePoint> size_response(const ScorerParams& p, const PocketGraph& g,
                                     std::span<const features::StructuralFeatures> templates,
                                     std::span<const int> size_grid, std::vector<int>* skipped = nullptr);

}  // namespace sbdd::affinity
