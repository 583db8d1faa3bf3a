#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sbdd/affinity/com.hpp"
#include "sbdd/affinity/scorer.hpp"
#include "sbdd/affinity/training.hpp"
#include "sbdd/error.hpp"

namespace sbdd::bench {

inline constexpr int kCheckpointVersion = 1;

enum class ModelKind { Scorer, Com };

std::string_view kind_name(ModelKind k) noexcept;

/// Raised for unreadable, truncated or tampered checkpoint files.
class CheckpointError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Checkpoint {
  int version = kCheckpointVersion;
  ModelKind kind = ModelKind::Scorer;
  std::map<std::string, int> arch;  // constructor arguments
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  Eigen::VectorXd values;
  features::FeatureStats stats;
  affinity::TrainConfig train;
  std::uint64_t seed = 0;
};

Checkpoint make_checkpoint(const affinity::ScorerParams& p, const affinity::TrainConfig& train = {});
Checkpoint make_checkpoint(const affinity::ComParams& p, const affinity::TrainConfig& train = {});

/// Rebuild parameters; throws ValidationError on kind or shape mismatch.
affinity::ScorerParams scorer_from(const Checkpoint& c);
affinity::ComParams com_from(const Checkpoint& c);

/// JSON document with the parameters as base64 little-endian float64 and a
/// BLAKE2b checksum over the payload and its shape manifest.
std::string checkpoint_to_string(const Checkpoint& c);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

affinity::ScorerParams load_scorer(const std::filesystem::path& path);
affinity::ComParams load_com(const std::filesystem::path& path);

}  // namespace sbdd::bench
