#include "sbdd/design/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sbdd/error.hpp"

namespace sbdd::design {

PropertyRegistry::PropertyRegistry() {
  add("size_penalty", [](const Candidate& c) { return -std::abs(c.molecule.n_atoms() - 25) / 25.0; });
  add("ring_bonus", [](const Candidate& c) {
    const int rings = c.molecule.topology().n_edges() - c.molecule.n_atoms() + c.molecule.topology().n_components();
    return std::min(rings, 4) / 4.0;
  });
  add("hetero_fraction", [](const Candidate& c) {
    const auto& a = c.molecule.atoms();
    if (a.empty()) return 0.0;
    const auto hetero = std::count_if(a.begin(), a.end(), [](chem::Element e) { return e != chem::Element::C; });
    return static_cast<double>(hetero) / static_cast<double>(a.size());
  });
  add("score", [](const Candidate& c) { return c.predicted_score; });
}

void PropertyRegistry::add(std::string name, PropertyFn fn) { fns_[std::move(name)] = std::move(fn); }

double PropertyRegistry::evaluate(const std::string& name, const Candidate& c) const {
  const auto it = fns_.find(name);
  if (it == fns_.end()) throw ValidationError("unknown property '" + name + "'");
  return it->second(c);
}

std::vector<std::string> PropertyRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : fns_) out.push_back(k);
  return out;
}

Objective parse_objective(const std::string& text) {
  Objective obj;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("objective term '" + item + "' is not name=weight");
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - eq - 1 || !std::isfinite(w)) {
      throw ValidationError("objective term '" + item + "' has a bad weight");
    }
    obj[item.substr(0, eq)] = w;
  }
  if (obj.empty()) throw ValidationError("empty objective");
  return obj;
}

double objective_value(const Objective& obj, const Candidate& c, const PropertyRegistry& reg) {
  double v = 0.0;
  for (const auto& [name, w] : obj) v += w * reg.evaluate(name, c);
  return v;
}

std::size_t optimize_properties(const std::vector<Candidate>& candidates, const Objective& obj,
                                const PropertyRegistry& reg) {
  if (candidates.empty()) throw ValidationError("optimize_properties: no candidates");
  for (const auto& [name, w] : obj) {
    if (!reg.contains(name)) throw ValidationError("unknown property '" + name + "'");
  }
  std::size_t best = 0;
  double best_v = objective_value(obj, candidates[0], reg);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = objective_value(obj, candidates[i], reg);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

namespace {

void check(const Pipeline& p) {
  if (!p.db || !p.atoms || !p.scorer || !p.com) throw ValidationError("pipeline is missing a component");
}

Candidate propose(const Pipeline& p, const StructureSampler& s, Rng& rng) {
  Candidate c;
  c.template_index = s.draw(rng);
  c.predicted_score = s.scores()[c.template_index];
  c.molecule = sample_atoms((*p.db)[c.template_index].graph, *p.atoms, rng);
  return c;
}

void finish(Candidate& c, const Eigen::Vector3d& com, const PropertyRegistry& reg, std::uint64_t pose_seed) {
  c.pose = dock::generate_pose(c.molecule, pose_seed);
  c.pose.colwise() += com - centroid(c.pose);
  for (const auto& name : reg.names()) c.properties[name] = reg.evaluate(name, c);
}

}  // namespace

std::vector<Candidate> generate(const Pipeline& p, const affinity::PocketGraph& pocket, int n, const Rng& rng) {
  check(p);
  if (n < 0) throw ValidationError("generate: n must be non-negative");
  const StructureSampler sampler(*p.db, *p.scorer, pocket, p.lo_pct, p.hi_pct);
  const Eigen::Vector3d com = affinity::predict_com(*p.com, pocket);
  const PropertyRegistry reg;
  std::vector<Candidate> out;
  for (int i = 0; i < n; ++i) {
    Rng r = rng.split(static_cast<std::uint64_t>(i));
    Candidate c = propose(p, sampler, r);
    finish(c, com, reg, r());
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> generate_po(const Pipeline& p, const affinity::PocketGraph& pocket, int n, const Objective& obj,
                                   int proposals, const Rng& rng, const PropertyRegistry& reg) {
  check(p);
  if (n < 0 || proposals < 1) throw ValidationError("generate_po: need n >= 0 and proposals >= 1");
  const StructureSampler sampler(*p.db, *p.scorer, pocket, p.lo_pct, p.hi_pct);
  const Eigen::Vector3d com = affinity::predict_com(*p.com, pocket);
  std::vector<Candidate> out;
  for (int i = 0; i < n; ++i) {
    Rng r = rng.split(static_cast<std::uint64_t>(i));
    std::vector<Candidate> pool;
    for (int j = 0; j < proposals; ++j) {
      Rng rj = r.split(static_cast<std::uint64_t>(j));
      pool.push_back(propose(p, sampler, rj));
    }
    Candidate c = std::move(pool[optimize_properties(pool, obj, reg)]);
    finish(c, com, reg, r());
    out.push_back(std::move(c));
  }
  return out;
}

ScanResult repurpose_scan(const affinity::PocketGraph& pocket, const StructureDb& db,
                          const affinity::ScorerParams& scorer, int k, const Rng& rng, std::size_t sample_size) {
  if (db.empty()) throw ValidationError("repurpose_scan: empty db");
  if (k < 1) throw ValidationError("repurpose_scan: k must be >= 1");
  std::vector<std::size_t> idx(db.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > sample_size) {
    Rng r = rng.split(0);
    // partial Fisher-Yates: the first sample_size slots are a uniform subset
    for (std::size_t i = 0; i < sample_size; ++i) std::swap(idx[i], idx[i + r.below(idx.size() - i)]);
    idx.resize(sample_size);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<features::StructuralFeatures> feats;
  feats.reserve(idx.size());
  for (std::size_t i : idx) feats.push_back(db.features()[i]);
  const auto scores = affinity::score_batch(scorer, feats, pocket);

  ScanResult res;
  res.scanned = idx.size();
  res.window = percentile_window(scores, 5.0, 10.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (scores[i] > res.window.first && scores[i] <= res.window.second) res.hits.push_back({idx[i], scores[i]});
  }
  std::stable_sort(res.hits.begin(), res.hits.end(), [](const ScanHit& a, const ScanHit& b) { return a.score < b.score; });
  res.window_population = res.hits.size();
  if (res.hits.size() < static_cast<std::size_t>(k)) {
    res.note = "window holds " + std::to_string(res.hits.size()) + " entries, fewer than the " + std::to_string(k) +
               " requested";
  } else {
    res.hits.resize(static_cast<std::size_t>(k));
  }
  return res;
}

}  // namespace sbdd::design
