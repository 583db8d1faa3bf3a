#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbdd/affinity/com.hpp"
#include "sbdd/affinity/scorer.hpp"
#include "sbdd/design/atoms.hpp"
#include "sbdd/design/structures.hpp"
#include "sbdd/dock/oracle.hpp"

namespace sbdd::design {

struct Candidate {
  chem::MolecularGraph molecule;
  dock::Pose pose;
  double predicted_score = 0.0;
  std::map<std::string, double> properties;
  std::size_t template_index = 0;  // into the structure db
};

using PropertyFn = std::function<double(const Candidate&)>;

/// Named property functions. Built in: size_penalty, ring_bonus,
/// hetero_fraction and score (the predicted score).
class PropertyRegistry {
 public:
  PropertyRegistry();
  void add(std::string name, PropertyFn fn);
  bool contains(const std::string& name) const { return fns_.count(name) > 0; }
  /// Throws ValidationError for unknown names.
  double evaluate(const std::string& name, const Candidate& c) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, PropertyFn> fns_;
};

using Objective = std::map<std::string, double>;

/// "name=weight,name=weight"; throws ValidationError on malformed input.
Objective parse_objective(const std::string& text);

/// Sum of weight * property.
double objective_value(const Objective& obj, const Candidate& c, const PropertyRegistry& reg);

/// Index of the candidate maximizing the objective, earliest on ties.
/// Throws ValidationError for an empty list or unknown property names.
std::size_t optimize_properties(const std::vector<Candidate>& candidates, const Objective& obj,
                                const PropertyRegistry& reg = PropertyRegistry());

struct Pipeline {
  const StructureDb* db = nullptr;
  const AtomTable* atoms = nullptr;
  const affinity::ScorerParams* scorer = nullptr;
  const affinity::ComParams* com = nullptr;
  double lo_pct = 5.0;
  double hi_pct = 10.0;
};

/// n candidates: window-sampled structure, degree-conditioned atoms, a
/// spring-embedded pose translated so its centroid is the predicted COM.
/// Candidate i depends only on (rng, i).
std::vector<Candidate> generate(const Pipeline& p, const affinity::PocketGraph& pocket, int n, const Rng& rng);

/// As generate, but each output is the objective-best of `proposals`
/// window-sampled, labelled proposals.
std::vector<Candidate> generate_po(const Pipeline& p, const affinity::PocketGraph& pocket, int n, const Objective& obj,
                                   int proposals, const Rng& rng, const PropertyRegistry& reg = PropertyRegistry());

struct ScanHit {
  std::size_t index = 0;  // into the db
  double score = 0.0;
};

struct ScanResult {
  std::vector<ScanHit> hits;  // ascending by score
  std::pair<double, double> window;
  std::size_t scanned = 0;
  std::size_t window_population = 0;
  std::optional<std::string> note;
};

/// Scores a random subset of min(16384, |db|) entries with one pocket
/// embedding and returns up to k entries in the (q5, q10] window.
ScanResult repurpose_scan(const affinity::PocketGraph& pocket, const StructureDb& db,
                          const affinity::ScorerParams& scorer, int k, const Rng& rng,
                          std::size_t sample_size = 16384);

}  // namespace sbdd::design
