#include "sbdd/affinity/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "sbdd/error.hpp"
#include "sbdd/nn/params.hpp"

namespace sbdd::affinity {

std::pair<std::vector<std::string>, std::vector<std::string>> split_pockets(std::vector<std::string> ids,
                                                                            double val_fraction, Rng& rng) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  rng.shuffle(ids);
  std::size_t n_val = 0;
  if (ids.size() >= 2 && val_fraction > 0.0) {
    n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(val_fraction * static_cast<double>(ids.size()))));
    n_val = std::min(n_val, ids.size() - 1);
  }
  std::vector<std::string> val(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::string> train(ids.begin() + static_cast<std::ptrdiff_t>(n_val), ids.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());
  return {train, val};
}

double scorer_loss_and_grad(const ScorerParams& p, std::span<const AffinityRecord* const> batch,
                            const PocketMap& pockets, ScorerParams* grad) {
  if (batch.empty()) return 0.0;
  std::map<std::string, std::vector<const AffinityRecord*>> groups;
  for (const AffinityRecord* r : batch) groups[r->pocket_id].push_back(r);

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& [pocket_id, recs] : groups) {
    const auto it = pockets.find(pocket_id);
    if (it == pockets.end()) throw ValidationError("record references unknown pocket '" + pocket_id + "'");
    const PocketGraph& g = it->second;

    PocketTape tape;
    const auto state = run_trunk(p.embed, p.layers, g, grad ? &tape : nullptr);
    const Eigen::VectorXd emb = state.h.rowwise().mean();
    const auto k = static_cast<Eigen::Index>(recs.size());
    Eigen::MatrixXd input(emb.size() + 4, k);
    Eigen::RowVectorXd target(k);
    for (Eigen::Index c = 0; c < k; ++c) {
      input.col(c) << emb, features::standardize(recs[static_cast<std::size_t>(c)]->features, p.stats);
      target[c] = recs[static_cast<std::size_t>(c)]->label;
    }
    nn::DenseTape<double> head_tape;
    const Eigen::MatrixXd pred = nn::mlp_forward(p.head, input, grad ? &head_tape : nullptr);
    const Eigen::RowVectorXd resid = pred.row(0) - target;
    loss += resid.squaredNorm() * inv_n;
    if (!grad) continue;

    const Eigen::MatrixXd dy = 2.0 * inv_n * resid;
    const Eigen::MatrixXd din = nn::mlp_backward(p.head, head_tape, dy, grad->head);
    const Eigen::VectorXd demb = din.topRows(emb.size()).rowwise().sum();
    const Eigen::MatrixXd dh = (demb / static_cast<double>(g.size())).replicate(1, g.size());
    const nn::Coords3<double> dx = nn::Coords3<double>::Zero(3, g.size());
    trunk_backward(p.embed, p.layers, g, tape, dh, dx, grad->embed, grad->layers);
  }
  if (!std::isfinite(loss)) throw NumericError("scorer loss is not finite");
  return loss;
}

namespace {

/// Cycles through a shuffled index list, reshuffling at each pass.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, Rng rng) : order_(n), rng_(rng) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    rng_.shuffle(order_);
  }

  std::vector<std::size_t> next(std::size_t size) {
    std::vector<std::size_t> out;
    out.reserve(size);
    while (out.size() < size) {
      if (pos_ == order_.size()) {
        rng_.shuffle(order_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  Rng rng_;
};

template <class Params, class LossFn, class ValFn>
struct Trainer {
  const TrainConfig& cfg;
  LossFn loss_and_grad;  // (const Params&, indices, Params* grad) -> loss
  ValFn validate;        // (const Params&) -> loss

  std::tuple<Params, std::vector<TrainLogEntry>, double, int> run(Params params, std::size_t n_train, Rng rng) {
    Eigen::VectorXd flat = nn::flatten(params);
    nn::AdamState adam;
    const nn::AdamConfig adam_cfg{cfg.lr};
    BatchSampler sampler(n_train, rng.split(1));
    const std::size_t batch = static_cast<std::size_t>(std::max(1, std::min<int>(cfg.batch_size, static_cast<int>(n_train))));

    Params best = params;
    double best_val = validate(params);
    int best_step = 0;
    int stale = 0;
    BatchSampler peek = sampler;
    std::vector<TrainLogEntry> log{{0, loss_and_grad(params, peek.next(batch), nullptr), best_val}};
    double running = 0.0;
    int running_n = 0;
    Params grad = params;
    for (int step = 1; step <= cfg.max_steps; ++step) {
      nn::set_zero(grad);
      running += loss_and_grad(params, sampler.next(batch), &grad);
      ++running_n;
      const Eigen::VectorXd g = nn::flatten(grad);
      if (!g.allFinite()) throw NumericError("non-finite gradient at step " + std::to_string(step));
      nn::adam_step(flat, g, adam, adam_cfg);
      nn::unflatten(params, flat);

      if (step % std::max(1, cfg.eval_every) == 0 || step == cfg.max_steps) {
        const double val = validate(params);
        log.push_back({step, running / running_n, val});
        running = 0.0;
        running_n = 0;
        if (val < best_val) {
          best_val = val;
          best = params;
          best_step = step;
          stale = 0;
        } else if (++stale >= cfg.patience) {
          break;
        }
      }
    }
    return {std::move(best), std::move(log), best_val, best_step};
  }
};

template <class Params, class L, class V>
Trainer<Params, L, V> make_trainer(const TrainConfig& cfg, L l, V v) {
  return Trainer<Params, L, V>{cfg, std::move(l), std::move(v)};
}

}  // namespace

ScorerTrainResult train_scorer(const std::vector<AffinityRecord>& records, const PocketMap& pockets,
                               const TrainConfig& cfg) {
  if (records.empty()) throw ValidationError("train_scorer: no records");
  for (const auto& r : records) {
    if (!pockets.count(r.pocket_id)) throw ValidationError("record references unknown pocket '" + r.pocket_id + "'");
    if (!std::isfinite(r.label)) throw ValidationError("record has a non-finite label");
  }

  ScorerTrainResult result;
  Rng rng(cfg.seed);
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.pocket_id);
  Rng split_rng = rng.split(0);
  std::tie(result.train_pockets, result.val_pockets) = split_pockets(ids, cfg.split_fraction, split_rng);
  const std::set<std::string> val_set(result.val_pockets.begin(), result.val_pockets.end());

  std::vector<const AffinityRecord*> train, val;
  for (const auto& r : records) (val_set.count(r.pocket_id) ? val : train).push_back(&r);

  const bool degenerate = std::all_of(records.begin(), records.end(),
                                      [&](const AffinityRecord& r) { return r.label == records.front().label; });
  if (degenerate) {
    result.warnings.emplace_back("all labels are identical; the fitted model is degenerate");
    spdlog::warn("train_scorer: {}", result.warnings.back());
  }

  std::vector<features::StructuralFeatures> train_features;
  double label_mean = 0.0;
  for (const auto* r : train) {
    train_features.push_back(r->features);
    label_mean += r->label;
  }
  label_mean /= static_cast<double>(train.size());

  Rng init_rng = rng.split(2);
  ScorerParams params = make_scorer(init_rng);
  params.stats = features::fit_stats(train_features);
  params.head.layers.back().bias[0] = label_mean;

  const auto& monitor = val.empty() ? train : val;
  auto loss_fn = [&](const ScorerParams& p, const std::vector<std::size_t>& idx, ScorerParams* g) {
    std::vector<const AffinityRecord*> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(train[i]);
    return scorer_loss_and_grad(p, batch, pockets, g);
  };
  auto val_fn = [&](const ScorerParams& p) { return scorer_loss_and_grad(p, monitor, pockets, nullptr); };

  auto trainer = make_trainer<ScorerParams>(cfg, loss_fn, val_fn);
  std::tie(result.params, result.log, result.best_val_loss, result.best_step) =
      trainer.run(std::move(params), train.size(), rng.split(3));
  for (const auto& e : result.log) spdlog::debug("scorer step {} train {} val {}", e.step, e.train_loss, e.val_loss);
  return result;
}

double com_loss_and_grad(const ComParams& p, std::span<const ComExample* const> batch, ComParams* grad) {
  if (batch.empty()) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const ComExample* ex : batch) {
    PocketTape tape;
    const auto state = run_trunk(p.embed, p.layers, ex->pocket, grad ? &tape : nullptr);
    const Eigen::Vector3d err = state.x.rowwise().mean() / kCoordScale - ex->com;
    const double dist = err.norm();
    loss += dist * inv_n;
    if (!grad || dist == 0.0) continue;
    const Eigen::Vector3d dpred = err / dist * inv_n;
    const int n = ex->pocket.size();
    const nn::Coords3<double> dx = (dpred / (n * kCoordScale)).replicate(1, n);
    const Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(state.h.rows(), n);
    trunk_backward(p.embed, p.layers, ex->pocket, tape, dh, dx, grad->embed, grad->layers);
  }
  if (!std::isfinite(loss)) throw NumericError("centre-of-mass loss is not finite");
  return loss;
}

ComTrainResult train_com(const std::vector<ComExample>& examples, const TrainConfig& cfg) {
  if (examples.empty()) throw ValidationError("train_com: no examples");
  Rng rng(cfg.seed);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < examples.size(); ++i) ids.push_back(std::to_string(i));
  Rng split_rng = rng.split(0);
  const auto [train_ids, val_ids] = split_pockets(ids, cfg.split_fraction, split_rng);
  std::vector<const ComExample*> train, val;
  for (const auto& id : train_ids) train.push_back(&examples[std::stoul(id)]);
  for (const auto& id : val_ids) val.push_back(&examples[std::stoul(id)]);

  Rng init_rng = rng.split(2);
  ComParams params = make_com_model(init_rng);
  const auto& monitor = val.empty() ? train : val;
  auto loss_fn = [&](const ComParams& p, const std::vector<std::size_t>& idx, ComParams* g) {
    std::vector<const ComExample*> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) batch.push_back(train[i]);
    return com_loss_and_grad(p, batch, g);
  };
  auto val_fn = [&](const ComParams& p) { return com_loss_and_grad(p, monitor, nullptr); };

  ComTrainResult result;
  auto trainer = make_trainer<ComParams>(cfg, loss_fn, val_fn);
  std::tie(result.params, result.log, result.val_error, result.best_step) =
      trainer.run(std::move(params), train.size(), rng.split(3));
  return result;
}

std::vector<SizePoint> size_response(const ScorerParams& p, const PocketGraph& g,
                                     std::span<const features::StructuralFeatures> templates,
                                     std::span<const int> size_grid, std::vector<int>* skipped) {
  const PocketScorer scorer(p, g);
  std::map<int, std::pair<double, int>> bins;
  for (const auto& f : templates) {
    auto& [sum, count] = bins[f.n_nodes];
    sum += scorer(f);
    ++count;
  }
  std::vector<SizePoint> out;
  for (int size : size_grid) {
    const auto it = bins.find(size);
    if (it == bins.end()) {
      if (skipped) skipped->push_back(size);
      continue;
    }
    out.push_back({size, it->second.first / it->second.second, it->second.second});
  }
  return out;
}

}  // namespace sbdd::affinity
