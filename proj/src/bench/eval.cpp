#include "sbdd/bench/eval.hpp"

#include <chrono>

#include "sbdd/bench/metrics.hpp"
#include "sbdd/error.hpp"
#include "sbdd/parallel.hpp"

namespace sbdd::bench {

using nlohmann::json;

std::uint64_t candidate_seed(std::uint64_t oracle_seed, const std::string& pocket_id, std::size_t i) {
  return Rng(oracle_seed).split(stable_hash(pocket_id)).split(i)();
}

EvalReport evaluate(const affinity::PocketMap& pockets, const std::vector<std::string>& pocket_order,
                    const std::map<std::string, std::vector<chem::MolecularGraph>>& molecules,
                    const std::map<std::string, std::vector<Coords>>& poses,
                    const std::map<std::string, double>& references, const std::vector<chem::Fingerprint>& train,
                    const EvalSettings& settings) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  EvalReport r;
  r.oracle_seed = settings.oracle_seed;
  for (const auto& id : pocket_order) {
    const auto pit = pockets.find(id);
    if (pit == pockets.end()) throw ValidationError("candidates reference unknown pocket '" + id + "'");
    const auto mit = molecules.find(id);
    if (mit == molecules.end() || mit->second.empty()) throw ValidationError("no candidates for pocket '" + id + "'");
    const auto& mols = mit->second;
    const auto posit = poses.find(id);
    const auto t1 = clock::now();

    PocketEval e;
    e.pocket_id = id;
    e.scores.resize(mols.size());
    parallel_for(mols.size(), settings.threads, [&](std::size_t i) {
      std::optional<Eigen::Vector3d> center;
      if (posit != poses.end() && i < posit->second.size() && posit->second[i].cols() > 0) {
        center = centroid(posit->second[i]);
      }
      e.scores[i] = dock::surrogate_vina(settings.weights, pit->second, mols[i],
                                         candidate_seed(settings.oracle_seed, id, i), settings.oracle, center);
    });
    e.mean_score = mean(e.scores);
    if (const auto ref = references.find(id); ref != references.end()) {
      e.reference_score = ref->second;
      e.high_affinity = metric_high_affinity(e.scores, ref->second);
    }
    const auto fps = fingerprints(mols);
    if (fps.size() >= 2) e.diversity = metric_diversity(fps);
    if (!train.empty()) e.novelty = metric_novelty(fps, train);
    e.wall_clock_s = std::chrono::duration<double>(clock::now() - t1).count();
    r.pockets.push_back(std::move(e));
  }
  aggregate(r);
  r.wall_clock_s = std::chrono::duration<double>(clock::now() - t0).count();
  return r;
}

void aggregate(EvalReport& r) {
  if (r.pockets.empty()) throw ValidationError("evaluation report has no pockets");
  double sum = 0.0, ha = 0.0, nov = 0.0, div = 0.0;
  std::size_t n = 0, n_ha = 0, n_nov = 0, n_div = 0;
  for (const auto& p : r.pockets) {
    const auto k = p.scores.size();
    for (double s : p.scores) sum += s;
    n += k;
    if (p.high_affinity) {
      ha += *p.high_affinity * static_cast<double>(k);
      n_ha += k;
    }
    if (p.novelty) {
      nov += *p.novelty * static_cast<double>(k);
      n_nov += k;
    }
    if (p.diversity) {
      div += *p.diversity;
      ++n_div;
    }
  }
  r.candidates = n;
  r.mean_score = n ? sum / static_cast<double>(n) : 0.0;
  r.high_affinity = n_ha ? std::optional(ha / static_cast<double>(n_ha)) : std::nullopt;
  r.novelty = n_nov ? std::optional(nov / static_cast<double>(n_nov)) : std::nullopt;
  r.diversity = n_div ? std::optional(div / static_cast<double>(n_div)) : std::nullopt;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json report_to_json(const EvalReport& r) {
  json pockets = json::array();
  for (const auto& p : r.pockets) {
    pockets.push_back({{"pocket_id", p.pocket_id},
                       {"candidates", p.scores.size()},
                       {"scores", p.scores},
                       {"mean_score", p.mean_score},
                       {"reference_score", opt(p.reference_score)},
                       {"high_affinity", opt(p.high_affinity)},
                       {"diversity", opt(p.diversity)},
                       {"novelty", opt(p.novelty)}});
  }
  return {{"pockets", pockets},
          {"aggregate",
           {{"candidates", r.candidates},
            {"mean_score", r.mean_score},
            {"high_affinity", opt(r.high_affinity)},
            {"diversity", opt(r.diversity)},
            {"novelty", opt(r.novelty)}}},
          {"oracle_seed", r.oracle_seed},
          {"note", r.note}};
}

json timing_to_json(const EvalReport& r) {
  json per = json::object();
  for (const auto& p : r.pockets) per[p.pocket_id] = p.wall_clock_s;
  return {{"total_s", r.wall_clock_s}, {"per_pocket_s", per}};
}

}  // namespace sbdd::bench
