#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbdd/affinity/training.hpp"
#include "sbdd/chem/fingerprint.hpp"
#include "sbdd/dock/oracle.hpp"

namespace sbdd::bench {

inline constexpr const char* kProtocolNote =
    "synthetic held-out pockets replace the benchmark test pockets; scores come from the built-in surrogate oracle";

struct PocketEval {
  std::string pocket_id;
  std::vector<double> scores;  // surrogate score per candidate, file order
  double mean_score = 0.0;
  std::optional<double> reference_score;
  std::optional<double> high_affinity;
  std::optional<double> diversity;  // needs two or more candidates
  std::optional<double> novelty;    // needs a training set
  double wall_clock_s = 0.0;
};

struct EvalReport {
  std::vector<PocketEval> pockets;
  std::size_t candidates = 0;
  double mean_score = 0.0;                // over all candidates
  std::optional<double> high_affinity;    // pooled over pockets with a reference
  std::optional<double> diversity;        // mean of per-pocket values
  std::optional<double> novelty;          // pooled over candidates
  double wall_clock_s = 0.0;
  std::uint64_t oracle_seed = 0;
  std::string note = kProtocolNote;
};

struct EvalSettings {
  dock::InteractionWeights weights;
  dock::DockConfig oracle;
  std::uint64_t oracle_seed = 0;
  int threads = 1;
};

/// Oracle seed of candidate i in a pocket; independent of evaluation order.
std::uint64_t candidate_seed(std::uint64_t oracle_seed, const std::string& pocket_id, std::size_t i);

/// Docks every candidate (conformer centred at the candidate pose centroid
/// when one is given, else at the pocket centroid) and computes the metrics.
EvalReport evaluate(const affinity::PocketMap& pockets, const std::vector<std::string>& pocket_order,
                    const std::map<std::string, std::vector<chem::MolecularGraph>>& molecules,
                    const std::map<std::string, std::vector<Coords>>& poses,
                    const std::map<std::string, double>& references, const std::vector<chem::Fingerprint>& train,
                    const EvalSettings& settings);

/// Recomputes every aggregate from the per-pocket entries. Pooled values
/// are candidate-weighted means of the per-pocket values.
void aggregate(EvalReport& r);

/// Without wall-clock fields, so identical runs give identical documents.
nlohmann::json report_to_json(const EvalReport& r);
nlohmann::json timing_to_json(const EvalReport& r);

}  // namespace sbdd::bench
