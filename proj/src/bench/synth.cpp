#include "sbdd/bench/synth.hpp"

#include <algorithm>
#include <cmath>

#include "sbdd/chem/smiles.hpp"
#include "sbdd/error.hpp"
#include "sbdd/parallel.hpp"

#include <spdlog/spdlog.h>

namespace sbdd::bench {

using chem::Bond;
using chem::Element;

affinity::PocketGraph random_pocket(Rng& rng, int n_residues, std::string id, const PocketShape& shape) {
  if (n_residues < 1) throw ValidationError("random_pocket: need at least one residue");
  const Eigen::Vector3d axes(rng.uniform(shape.axis_min, shape.axis_max), rng.uniform(shape.axis_min, shape.axis_max),
                             rng.uniform(shape.axis_min, shape.axis_max));
  const Eigen::Matrix3d orient = rotation_from_uniforms(rng.uniform(), rng.uniform(), rng.uniform()).toRotationMatrix();
  const Eigen::Vector3d offset(rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0));
  std::vector<affinity::Residue> res;
  double spacing = shape.min_spacing;
  int failures = 0;
  while (static_cast<int>(res.size()) < n_residues) {
    Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
    dir.normalize();
    if (dir.z() > shape.mouth_cos) continue;
    const Eigen::Vector3d local = axes.cwiseProduct(dir) * (1.0 + rng.normal(0.0, 0.04));
    const Eigen::Vector3d p = orient * local + offset;
    const bool clash = std::any_of(res.begin(), res.end(), [&](const auto& r) { return (r.center - p).norm() < spacing; });
    if (clash) {
      if (++failures > 200) {
        spacing *= 0.9;
        failures = 0;
      }
      continue;
    }
    affinity::Residue r;
    r.type = static_cast<int>(rng.below(affinity::kAminoAcids.size()));
    r.center = p;
    res.push_back(r);
  }
  return affinity::build_pocket_graph(std::move(res), std::move(id));
}

namespace {

constexpr std::array<double, 9> kElementWeights = {0.70, 0.12, 0.12, 0.02, 0.005, 0.02, 0.01, 0.004, 0.001};

struct Builder {
  std::vector<Element> atoms;
  std::vector<Bond> bonds;
  std::vector<int> used;  // order-weighted degree
  std::vector<std::vector<int>> adj;

  int free(int i) const { return chem::max_valence(atoms[static_cast<std::size_t>(i)]) - used[static_cast<std::size_t>(i)]; }

  void add_bond(int i, int j, int order) {
    bonds.push_back({i, j, order});
    used[static_cast<std::size_t>(i)] += order;
    used[static_cast<std::size_t>(j)] += order;
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }

  std::vector<int> distances(int from) const {
    std::vector<int> d(atoms.size(), -1);
    std::vector<int> q{from};
    d[static_cast<std::size_t>(from)] = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      for (int w : adj[static_cast<std::size_t>(q[k])]) {
        if (d[static_cast<std::size_t>(w)] < 0) {
          d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(q[k])] + 1;
          q.push_back(w);
        }
      }
    }
    return d;
  }
};

Element draw_element(Rng& rng, bool must_branch) {
  std::array<double, 9> w = kElementWeights;
  if (must_branch) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (chem::max_valence(chem::kElements[i]) < 2) w[i] = 0.0;
    }
  }
  return chem::kElements[rng.categorical(w)];
}

}  // namespace

chem::MolecularGraph random_molecule(Rng& rng, int n_atoms) {
  if (n_atoms < 1) throw ValidationError("random_molecule: need at least one atom");
  for (;;) {
    Builder b;
    b.atoms.push_back(draw_element(rng, n_atoms > 1));
    b.used.push_back(0);
    b.adj.emplace_back();
    bool ok = true;
    for (int i = 1; i < n_atoms && ok; ++i) {
      std::vector<double> w;
      for (int j = 0; j < i; ++j) {
        const int nb = static_cast<int>(b.adj[static_cast<std::size_t>(j)].size());
        w.push_back(b.free(j) > 0 && nb < 3 ? 1.0 : (b.free(j) > 0 && nb < 4 ? 0.15 : 0.0));
      }
      if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
        ok = false;
        break;
      }
      const int parent = static_cast<int>(rng.categorical(w));
      b.atoms.push_back(draw_element(rng, i + 1 < n_atoms && rng.uniform() < 0.6));
      b.used.push_back(0);
      b.adj.emplace_back();
      b.add_bond(parent, i, 1);
    }
    if (!ok) continue;

    const int rings = n_atoms >= 5 ? rng.between(0, std::min(4, n_atoms / 5)) : 0;
    for (int r = 0, tries = 0; r < rings && tries < 50; ++tries) {
      const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_atoms)));
      if (b.free(u) < 1) continue;
      const auto d = b.distances(u);
      std::vector<int> cands;
      for (int v = 0; v < n_atoms; ++v) {
        if (d[static_cast<std::size_t>(v)] >= 4 && d[static_cast<std::size_t>(v)] <= 6 && b.free(v) >= 1) {
          cands.push_back(v);
        }
      }
      if (cands.empty()) continue;
      b.add_bond(u, cands[rng.below(cands.size())], 1);
      ++r;
    }
    for (auto& bond : b.bonds) {
      if (rng.uniform() < 0.08 && b.free(bond.i) >= 1 && b.free(bond.j) >= 1) {
        ++bond.order;
        ++b.used[static_cast<std::size_t>(bond.i)];
        ++b.used[static_cast<std::size_t>(bond.j)];
      }
    }
    chem::MolecularGraph m(b.atoms, b.bonds);
    if (chem::valence_ok(m) && m.topology().connected()) return m;
  }
}

std::vector<chem::LigandEntry> random_ligand_db(Rng& rng, int count, int min_atoms, int max_atoms) {
  std::vector<chem::LigandEntry> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto m = random_molecule(rng, rng.between(min_atoms, max_atoms));
    auto smiles = chem::write_smiles(m);
    out.push_back({"lig" + std::to_string(i), std::move(smiles), std::move(m)});
  }
  return out;
}

SynthDataset synth_dataset(const SynthConfig& cfg, const std::vector<chem::LigandEntry>& db) {
  if (cfg.n_pockets < 1 || cfg.extras_per_pocket < 0 || cfg.reference_draws < 1) {
    throw ValidationError("synth_dataset: counts must be positive");
  }
  if (cfg.min_residues < 1 || cfg.min_residues > cfg.max_residues) {
    throw ValidationError("synth_dataset: bad residue range");
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& m = db[i].molecule;
    if (m.n_atoms() > 0 && m.topology().connected() && chem::valence_ok(m)) usable.push_back(i);
  }
  const auto per_pocket = static_cast<std::size_t>(cfg.extras_per_pocket + cfg.reference_draws);
  if (usable.size() < per_pocket) {
    throw ValidationError("synth_dataset: ligand db has " + std::to_string(usable.size()) + " usable entries, need " +
                          std::to_string(per_pocket));
  }

  const Rng root(cfg.seed);
  SynthDataset out;
  struct Job {
    std::size_t pocket;
    std::size_t ligand;  // into db
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int p = 0; p < cfg.n_pockets; ++p) {
    Rng r = root.split(static_cast<std::uint64_t>(p));
    char id[32];
    std::snprintf(id, sizeof id, "pocket%03d", p);
    Rng shape_rng = r.split(0);
    out.pockets.push_back(random_pocket(shape_rng, shape_rng.between(cfg.min_residues, cfg.max_residues), id));
    // partial Fisher-Yates over usable entries
    Rng pick = r.split(1);
    std::vector<std::size_t> idx = usable;
    for (std::size_t k = 0; k < per_pocket; ++k) std::swap(idx[k], idx[k + pick.below(idx.size() - k)]);
    Rng seeds = r.split(2);
    for (std::size_t k = 0; k < per_pocket; ++k) jobs.push_back({static_cast<std::size_t>(p), idx[k], seeds()});
  }

  std::vector<dock::DockResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
    const auto& job = jobs[j];
    results[j] = dock::dock(cfg.weights, out.pockets[job.pocket], db[job.ligand].molecule, job.seed, cfg.oracle);
  });

  const auto draws = static_cast<std::size_t>(cfg.reference_draws);
  for (std::size_t p = 0; p < out.pockets.size(); ++p) {
    const std::size_t base = p * per_pocket;
    std::size_t best = base;
    for (std::size_t k = base + 1; k < base + draws; ++k) {
      if (results[k].score < results[best].score) best = k;
    }
    const auto& pocket = out.pockets[p];
    auto emit = [&](std::size_t k) {
      const auto& e = db[jobs[k].ligand];
      out.records.push_back({pocket.id, e.id, features::extract(e.molecule.topology()), results[k].score});
      out.record_smiles.push_back(e.smiles);
    };
    const auto& ref = db[jobs[best].ligand];
    out.references.push_back({pocket.id, ref.id, ref.smiles, results[best].score, centroid(results[best].pose)});
    emit(best);
    for (std::size_t k = base + draws; k < base + per_pocket; ++k) emit(k);
  }
  spdlog::debug("synth_dataset: {} pockets, {} records", out.pockets.size(), out.records.size());
  return out;
}

double planted_optimum(const affinity::PocketGraph& g) {
  if (g.size() == 0) throw ValidationError("planted_optimum: empty pocket");
  int hydrophobic = 0;
  for (const auto& r : g.residues) hydrophobic += dock::hydrophobic_residue(r.type);
  return 8.0 + 40.0 * hydrophobic / g.size();
}

double planted_label(double optimum, int n_nodes) {
  const double d = n_nodes - optimum;
  return -6.0 + 0.02 * d * d;
}

PlantedDataset planted_dataset(const PlantedConfig& cfg) {
  if (cfg.n_pockets < 1 || cfg.residues < 1 || cfg.ligands_per_pocket < 1 || cfg.min_atoms < 1 ||
      cfg.min_atoms > cfg.max_atoms) {
    throw ValidationError("planted_dataset: bad configuration");
  }
  const Rng root(cfg.seed);
  PlantedDataset out;
  for (int p = 0; p < cfg.n_pockets; ++p) {
    Rng r = root.split(static_cast<std::uint64_t>(p));
    const std::string id = "planted" + std::to_string(p);
    auto g = random_pocket(r, cfg.residues, id);
    const double opt = planted_optimum(g);
    for (int i = 0; i < cfg.ligands_per_pocket; ++i) {
      const auto m = random_molecule(r, r.between(cfg.min_atoms, cfg.max_atoms));
      const double y = planted_label(opt, m.n_atoms()) + r.normal(0.0, cfg.noise);
      out.records.push_back({id, id + "_l" + std::to_string(i), features::extract(m.topology()), y});
    }
    out.optimum.emplace(id, opt);
    out.pocket_order.push_back(id);
    out.pockets.emplace(id, std::move(g));
  }
  return out;
}

}  // namespace sbdd::bench
