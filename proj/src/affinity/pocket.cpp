#include "sbdd/affinity/pocket.hpp"

#include <algorithm>
#include <numeric>

#include "sbdd/error.hpp"

namespace sbdd::affinity {

int amino_acid_index(std::string_view code) {
  for (std::size_t i = 0; i < kAminoAcids.size(); ++i) {
    if (kAminoAcids[i] == code) return static_cast<int>(i);
  }
  throw ValidationError("unknown amino-acid code '" + std::string(code) + "'");
}

Coords PocketGraph::coords() const {
  Coords x(3, size());
  for (int i = 0; i < size(); ++i) x.col(i) = residues[static_cast<std::size_t>(i)].center;
  return x;
}

Eigen::MatrixXd PocketGraph::one_hot() const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kAminoAcids.size()), size());
  for (int i = 0; i < size(); ++i) h(residues[static_cast<std::size_t>(i)].type, i) = 1.0;
  return h;
}

PocketGraph build_pocket_graph(std::vector<Residue> residues, std::string id) {
  if (residues.empty()) throw ValidationError("pocket has no residues");
  for (const Residue& r : residues) {
    if (!r.center.allFinite()) throw ValidationError("pocket residue has non-finite coordinates");
    if (r.type < 0 || r.type >= static_cast<int>(kAminoAcids.size())) throw ValidationError("bad residue type");
  }
  PocketGraph g;
  g.id = std::move(id);
  g.residues = std::move(residues);
  const int n = g.size();
  std::vector<std::pair<double, int>> candidates;
  for (int v = 0; v < n; ++v) {
    candidates.clear();
    for (int u = 0; u < n; ++u) {
      if (u == v) continue;
      const double d =
          (g.residues[static_cast<std::size_t>(u)].center - g.residues[static_cast<std::size_t>(v)].center).norm();
      if (d <= kPocketCutoff) candidates.emplace_back(d, u);
    }
    std::sort(candidates.begin(), candidates.end());
    const std::size_t keep = std::min<std::size_t>(candidates.size(), kMaxNeighbors);
    std::vector<int> chosen;
    for (std::size_t k = 0; k < keep; ++k) chosen.push_back(candidates[k].second);
    std::sort(chosen.begin(), chosen.end());
    for (int u : chosen) {
      g.edges.src.push_back(u);
      g.edges.dst.push_back(v);
    }
  }
  return g;
}

PocketGraph transformed(const PocketGraph& g, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  std::vector<Residue> res = g.residues;
  for (Residue& r : res) r.center = rotation * r.center + translation;
  return build_pocket_graph(std::move(res), g.id);
}

PocketGraph permuted(const PocketGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.size()) throw ValidationError("permutation size mismatch");
  std::vector<Residue> res(g.residues.size());
  for (std::size_t i = 0; i < perm.size(); ++i) res[static_cast<std::size_t>(perm[i])] = g.residues[i];
  return build_pocket_graph(std::move(res), g.id);
}

}  // namespace sbdd::affinity
