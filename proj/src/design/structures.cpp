#include "sbdd/design/structures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sbdd/chem/smiles.hpp"
#include "sbdd/error.hpp"

namespace sbdd::design {

std::pair<double, double> percentile_window(std::vector<double> scores, double lo_pct, double hi_pct) {
  if (scores.empty()) throw ValidationError("percentile_window: no scores");
  if (lo_pct > hi_pct) throw ValidationError("percentile_window: lower percentile above upper");
  std::sort(scores.begin(), scores.end());
  const auto n = static_cast<double>(scores.size());
  const auto rank = [&](double p) {
    const double k = std::ceil(p / 100.0 * n);
    return static_cast<std::size_t>(std::clamp(k, 1.0, n)) - 1;
  };
  return {scores[rank(lo_pct)], scores[rank(hi_pct)]};
}

namespace {

std::string dedup_key(const chem::UnlabelledGraph& u, const features::StructuralFeatures& f) {
  std::vector<int> deg;
  for (int i = 0; i < u.n_nodes(); ++i) deg.push_back(chem::node_degree(u, i));
  std::sort(deg.begin(), deg.end());
  std::ostringstream os;
  os << f.n_nodes << ',' << f.n_rings << ',' << f.n_rotatable << ',' << f.diameter << ':';
  for (int d : deg) os << d;
  return os.str();
}

}  // namespace

bool StructureDb::add(const chem::UnlabelledGraph& u, std::string id, std::string smiles) {
  if (u.n_nodes() == 0 || !u.connected()) {
    ++rejected_;
    return false;
  }
  for (int i = 0; i < u.n_nodes(); ++i) {
    if (chem::node_degree(u, i) > 6) {
      ++rejected_;
      return false;
    }
  }
  const auto f = features::extract(u);
  if (dedup_) {
    std::string key = dedup_key(u, f);
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it != keys_.end() && *it == key) {
      ++duplicates_;
      return false;
    }
    keys_.insert(it, std::move(key));
  }
  if (id.empty()) id = "u" + std::to_string(entries_.size());
  entries_.push_back({u, f, std::move(id), std::move(smiles)});
  features_.push_back(f);
  return true;
}

StructureDb StructureDb::from_ligands(const std::vector<chem::LigandEntry>& ligands, bool dedup) {
  StructureDb db(dedup);
  for (const auto& l : ligands) db.add(chem::strip_labels(l.molecule), l.id, l.smiles);
  return db;
}

StructureSampler::StructureSampler(const StructureDb& db, const affinity::ScorerParams& scorer,
                                   const affinity::PocketGraph& pocket, double lo_pct, double hi_pct) {
  if (db.empty()) throw ValidationError("structure db is empty");
  scores_ = affinity::score_batch(scorer, db.features(), pocket);
  window_ = percentile_window(scores_, lo_pct, hi_pct);
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (scores_[i] >= window_.first && scores_[i] <= window_.second) eligible_.push_back(i);
  }
  if (eligible_.empty()) {
    std::ostringstream os;
    os << "no db structure scores inside the window [" << window_.first << ", " << window_.second << "]";
    throw ValidationError(os.str());
  }
}

std::size_t StructureSampler::draw(Rng& rng) const { return eligible_[rng.below(eligible_.size())]; }

chem::UnlabelledGraph sample_structure(const StructureDb& db, const affinity::PocketGraph& pocket,
                                       const affinity::ScorerParams& scorer, Rng& rng, double lo_pct, double hi_pct) {
  const StructureSampler s(db, scorer, pocket, lo_pct, hi_pct);
  return db[s.draw(rng)].graph;
}

}  // namespace sbdd::design
