#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sbdd/affinity/scorer.hpp"
#include "sbdd/chem/ligand_io.hpp"
#include "sbdd/features.hpp"

namespace sbdd::design {

/// Nearest-rank percentiles: q_p is the k-th smallest score with
/// k = ceil(p / 100 * n) clamped to [1, n]. Throws ValidationError on empty
/// input or when lo_pct > hi_pct.
std::pair<double, double> percentile_window(std::vector<double> scores, double lo_pct = 5.0, double hi_pct = 10.0);

struct StructureEntry {
  chem::UnlabelledGraph graph;
  features::StructuralFeatures features;
  std::string id;
  std::string smiles;  // source molecule, labels included
};

/// Database of ligand topologies. With dedup on, entries sharing features
/// and sorted degree sequence collapse onto the first one seen.
class StructureDb {
 public:
  explicit StructureDb(bool dedup = true) : dedup_(dedup) {}

  /// Adds a template; returns false (and counts a rejection) for
  /// disconnected graphs or nodes of order-weighted degree above 6, and
  /// false without counting for duplicates.
  bool add(const chem::UnlabelledGraph& u, std::string id = {}, std::string smiles = {});

  static StructureDb from_ligands(const std::vector<chem::LigandEntry>& ligands, bool dedup = true);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const StructureEntry& operator[](std::size_t i) const { return entries_.at(i); }
  const std::vector<StructureEntry>& entries() const noexcept { return entries_; }
  const std::vector<features::StructuralFeatures>& features() const noexcept { return features_; }
  int rejected() const noexcept { return rejected_; }
  int duplicates() const noexcept { return duplicates_; }

 private:
  bool dedup_;
  std::vector<StructureEntry> entries_;
  std::vector<features::StructuralFeatures> features_;
  std::vector<std::string> keys_;  // sorted, for dedup lookups
  int rejected_ = 0;
  int duplicates_ = 0;
};

/// Scores every db entry against one pocket and holds the eligible set
/// {U : v_min <= g(U, P) <= v_max}.
class StructureSampler {
 public:
  StructureSampler(const StructureDb& db, const affinity::ScorerParams& scorer, const affinity::PocketGraph& pocket,
                   double lo_pct = 5.0, double hi_pct = 10.0);

  /// Index of a uniformly drawn eligible entry.
  std::size_t draw(Rng& rng) const;

  const std::vector<double>& scores() const noexcept { return scores_; }
  const std::vector<std::size_t>& eligible() const noexcept { return eligible_; }
  std::pair<double, double> window() const noexcept { return window_; }

 private:
  std::vector<double> scores_;
  std::vector<std::size_t> eligible_;
  std::pair<double, double> window_;
};

/// One draw from the percentile window; throws ValidationError when the
/// eligible set is empty.
chem::UnlabelledGraph sample_structure(const StructureDb& db, const affinity::PocketGraph& pocket,
                                       const affinity::ScorerParams& scorer, Rng& rng, double lo_pct = 5.0,
                                       double hi_pct = 10.0);

}  // namespace sbdd::design
