#include "sbdd/expressivity/refine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sbdd/chem/smiles.hpp"
#include "sbdd/dock/bfgs.hpp"
#include "sbdd/dock/oracle.hpp"
#include "sbdd/error.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::expressivity {

FeaturedGraph::FeaturedGraph(std::vector<std::string> nodes, std::vector<FeaturedEdge> edges,
                             std::optional<Coords> coords)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), coords_(std::move(coords)) {
  const int n = n_nodes();
  if (coords_ && coords_->cols() != n) throw ValidationError("featured graph: coordinate count differs from nodes");
  adjacency_.resize(nodes_.size());
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < n_edges(); ++e) {
    const auto& x = edges_[static_cast<std::size_t>(e)];
    if (x.u < 0 || x.v < 0 || x.u >= n || x.v >= n) throw ValidationError("featured graph: edge index out of range");
    if (x.u == x.v) throw ValidationError("featured graph: self loop");
    if (!seen.insert(std::minmax(x.u, x.v)).second) throw ValidationError("featured graph: repeated edge");
    adjacency_[static_cast<std::size_t>(x.u)].push_back({x.v, e});
    adjacency_[static_cast<std::size_t>(x.v)].push_back({x.u, e});
  }
}

chem::UnlabelledGraph FeaturedGraph::topology() const {
  std::vector<chem::Bond> bonds;
  for (const auto& e : edges_) bonds.push_back({e.u, e.v, 1});
  return {n_nodes(), bonds};
}

FeaturedGraph from_molecule(const chem::MolecularGraph& m, bool uniform) {
  std::vector<std::string> nodes;
  for (auto e : m.atoms()) nodes.emplace_back(uniform ? "*" : chem::symbol(e));
  std::vector<FeaturedEdge> edges;
  for (const auto& b : m.bonds()) edges.push_back({b.i, b.j, uniform ? "-" : std::to_string(b.order)});
  return {std::move(nodes), std::move(edges), m.pose()};
}

FeaturedGraph from_pocket(const affinity::PocketGraph& g) {
  std::vector<std::string> nodes;
  for (const auto& r : g.residues) nodes.emplace_back(affinity::kAminoAcids.at(static_cast<std::size_t>(r.type)));
  std::set<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < g.edges.size(); ++k) pairs.insert(std::minmax(g.edges.src[k], g.edges.dst[k]));
  std::vector<FeaturedEdge> edges;
  for (const auto& [u, v] : pairs) edges.push_back({u, v, "-"});
  return {std::move(nodes), std::move(edges), g.coords()};
}

std::string_view mode_name(Mode m) noexcept { return m == Mode::LU ? "LU" : "LU3D"; }

ColorRegistry::ColorRegistry() : digest_([](const std::string& s) { return stable_hash(s); }) {}

std::uint64_t ColorRegistry::id(const std::string& encoding) {
  if (const auto it = by_encoding_.find(encoding); it != by_encoding_.end()) return it->second;
  std::uint64_t h = digest_(encoding);
  while (by_id_.count(h)) {
    ++collisions_;
    ++h;
  }
  const auto [it, ok] = by_encoding_.emplace(encoding, h);
  by_id_.emplace(h, &it->first);
  return h;
}

std::vector<std::uint64_t> ColorHistory::multiset(int l) const {
  auto c = colors.at(static_cast<std::size_t>(l));
  std::sort(c.begin(), c.end());
  return c;
}

std::size_t ColorHistory::classes(int l) const {
  const auto& c = colors.at(static_cast<std::size_t>(l));
  return std::set<std::uint64_t>(c.begin(), c.end()).size();
}

namespace {

// Length-prefixed so that token contents cannot forge separators.
std::string quoted(const std::string& s) { return std::to_string(s.size()) + ":" + s; }

}  // namespace

ColorHistory color_refine(const FeaturedGraph& g, int L, Mode mode, ColorRegistry& registry) {
  if (L < 0) throw ValidationError("color_refine: negative depth");
  if (mode == Mode::LU3D && !g.coords()) throw ValidationError("LU3D refinement needs coordinates");
  const int n = g.n_nodes();
  std::vector<std::string> edge_part(static_cast<std::size_t>(g.n_edges()));
  for (int e = 0; e < g.n_edges(); ++e) {
    const auto& x = g.edges()[static_cast<std::size_t>(e)];
    edge_part[static_cast<std::size_t>(e)] = quoted(x.feature);
    if (mode == Mode::LU3D) {
      const double d = (g.coords()->col(x.u) - g.coords()->col(x.v)).norm();
      if (!std::isfinite(d)) throw NumericError("color_refine: non-finite coordinates");
      edge_part[static_cast<std::size_t>(e)] += "," + std::to_string(std::llround(d * 1e6));
    }
  }
  ColorHistory h;
  h.colors.emplace_back();
  for (int v = 0; v < n; ++v) h.colors[0].push_back(registry.id("n" + quoted(g.nodes()[static_cast<std::size_t>(v)])));
  std::vector<std::string> items;
  for (int l = 0; l < L; ++l) {
    const auto& prev = h.colors.back();
    std::vector<std::uint64_t> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      items.clear();
      for (const auto& inc : g.neighbors(v)) {
        items.push_back(std::to_string(prev[static_cast<std::size_t>(inc.node)]) + "," +
                        edge_part[static_cast<std::size_t>(inc.edge)]);
      }
      std::sort(items.begin(), items.end());
      std::string enc = "t" + std::to_string(prev[static_cast<std::size_t>(v)]) + "{";
      for (const auto& s : items) enc += quoted(s);
      enc += "}";
      next[static_cast<std::size_t>(v)] = registry.id(enc);
    }
    h.colors.push_back(std::move(next));
  }
  return h;
}

ColorHistory color_refine(const FeaturedGraph& g, int L, Mode mode) {
  ColorRegistry r;
  return color_refine(g, L, mode, r);
}

Verdict indistinguishable(const FeaturedGraph& g1, const FeaturedGraph& g2, Mode mode, int L) {
  if (L < 0) L = 2 * std::max(g1.n_nodes(), g2.n_nodes());
  ColorRegistry reg;
  const auto h1 = color_refine(g1, L, mode, reg);
  const auto h2 = color_refine(g2, L, mode, reg);
  Verdict v;
  for (int l = 0; l <= L; ++l) {
    if (h1.multiset(l) != h2.multiset(l)) {
      v.depth = l;
      return v;
    }
  }
  v.indistinguishable = true;
  v.depth = L;
  std::map<std::uint64_t, std::vector<int>> pool;
  for (int u = 0; u < g2.n_nodes(); ++u) pool[h2.colors.back()[static_cast<std::size_t>(u)]].push_back(u);
  for (auto& [c, nodes] : pool) std::reverse(nodes.begin(), nodes.end());
  for (int u = 0; u < g1.n_nodes(); ++u) {
    auto& bucket = pool[h1.colors.back()[static_cast<std::size_t>(u)]];
    v.pairing.emplace_back(u, bucket.back());
    bucket.pop_back();
  }
  return v;
}

PropertyCertificate graph_properties(const FeaturedGraph& g) {
  const int n = g.n_nodes();
  if (n > kMaxCertificateNodes) {
    throw ValidationError("graph_properties: " + std::to_string(n) + " nodes exceeds the limit of " +
                          std::to_string(kMaxCertificateNodes));
  }
  constexpr std::size_t kMaxCycles = 2'000'000;
  PropertyCertificate c;
  // simple cycles as edge sets; each cycle is rooted at its smallest node
  // and kept in the direction whose second node is below its last node
  std::vector<std::vector<bool>> cycles;
  std::vector<int> path;
  std::vector<int> path_edges;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  std::function<void(int, int)> dfs = [&](int start, int v) {
    for (const auto& inc : g.neighbors(v)) {
      const int w = inc.node;
      if (w == start && path.size() >= 3 && path[1] < path.back()) {
        std::vector<bool> edges(static_cast<std::size_t>(g.n_edges()), false);
        for (int e : path_edges) edges[static_cast<std::size_t>(e)] = true;
        edges[static_cast<std::size_t>(inc.edge)] = true;
        cycles.push_back(std::move(edges));
        const int len = static_cast<int>(path.size());
        c.girth = c.girth == 0 ? len : std::min(c.girth, len);
        c.largest_cycle = std::max(c.largest_cycle, len);
        if (cycles.size() > kMaxCycles) throw ValidationError("graph_properties: too many cycles to enumerate");
        continue;
      }
      if (w <= start || on_path[static_cast<std::size_t>(w)]) continue;
      on_path[static_cast<std::size_t>(w)] = true;
      path.push_back(w);
      path_edges.push_back(inc.edge);
      dfs(start, w);
      path.pop_back();
      path_edges.pop_back();
      on_path[static_cast<std::size_t>(w)] = false;
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on_path[static_cast<std::size_t>(s)] = true;
    dfs(s, s);
    on_path[static_cast<std::size_t>(s)] = false;
  }
  c.cycle_count = static_cast<int>(cycles.size());
  for (std::size_t a = 0; a < cycles.size() && !c.conjoined_cycles; ++a) {
    for (std::size_t b = a + 1; b < cycles.size() && !c.conjoined_cycles; ++b) {
      for (std::size_t e = 0; e < cycles[a].size(); ++e) {
        if (cycles[a][e] && cycles[b][e]) {
          c.conjoined_cycles = true;
          break;
        }
      }
    }
  }
  const auto br = features::bridges(g.topology());
  c.cut_edges = static_cast<int>(std::count(br.begin(), br.end(), true));
  return c;
}

FeaturedGraph build_complex(const FeaturedGraph& p, const FeaturedGraph& g, const CrossEdgeRule& rule) {
  const int np = p.n_nodes();
  std::vector<std::string> nodes = p.nodes();
  nodes.insert(nodes.end(), g.nodes().begin(), g.nodes().end());
  std::vector<FeaturedEdge> edges = p.edges();
  for (const auto& e : g.edges()) edges.push_back({e.u + np, e.v + np, e.feature});
  for (int u = 0; u < np; ++u) {
    for (int v = 0; v < g.n_nodes(); ++v) {
      edges.push_back({u, v + np, rule(p.nodes()[static_cast<std::size_t>(u)], g.nodes()[static_cast<std::size_t>(v)])});
    }
  }
  std::optional<Coords> coords;
  if (p.coords() && g.coords()) {
    Coords x(3, np + g.n_nodes());
    x << *p.coords(), *g.coords();
    coords = std::move(x);
  }
  return {std::move(nodes), std::move(edges), std::move(coords)};
}

Prop1Result verify_prop1(const FeaturedGraph& p, const FeaturedGraph& g1, const FeaturedGraph& g2,
                         const CrossEdgeRule& rule, int L) {
  Prop1Result r;
  r.ligands = indistinguishable(g1, g2, Mode::LU, L);
  if (!r.ligands.indistinguishable) {
    throw ValidationError("verify_prop1: the ligand graphs are distinguishable at depth " +
                          std::to_string(r.ligands.depth));
  }
  r.complexes = indistinguishable(build_complex(p, g1, rule), build_complex(p, g2, rule), Mode::LU, L);
  r.holds = r.complexes.indistinguishable;
  return r;
}

Coords unit_bond_coordinates(const chem::MolecularGraph& m, std::uint64_t seed) {
  Coords x = dock::generate_pose(m, seed);
  const auto& bonds = m.bonds();
  if (bonds.empty()) return x;
  double total = 0.0;
  for (const auto& b : bonds) total += (x.col(b.i) - x.col(b.j)).norm();
  x *= static_cast<double>(bonds.size()) / total;
  auto f = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    const auto p = v.reshaped(3, x.cols());
    if (grad) grad->setZero(v.size());
    double e = 0.0;
    for (const auto& b : bonds) {
      const Eigen::Vector3d d = p.col(b.i) - p.col(b.j);
      const double len = d.norm();
      e += (len - 1.0) * (len - 1.0);
      if (grad) {
        const Eigen::Vector3d gvec = 2.0 * (len - 1.0) / len * d;
        grad->segment<3>(3 * b.i) += gvec;
        grad->segment<3>(3 * b.j) -= gvec;
      }
    }
    return e;
  };
  dock::BfgsOptions opt;
  opt.max_iters = 5000;
  opt.grad_tol = 1e-13;
  const auto res = dock::minimize_bfgs(f, x.reshaped(), opt);
  x = res.x.reshaped(3, x.cols());
  for (const auto& b : bonds) {
    if (std::abs((x.col(b.i) - x.col(b.j)).norm() - 1.0) > 1e-9) {
      throw NumericError("unit_bond_coordinates: bonds did not converge to unit length");
    }
  }
  return x - centroid(x).replicate(1, x.cols());
}

CertifiedPair certified_pair() {
  CertifiedPair c;
  const auto m1 = chem::parse_smiles(c.smiles1);
  const auto m2 = chem::parse_smiles(c.smiles2);
  c.g1 = from_molecule(m1.with_pose(unit_bond_coordinates(m1)), true);
  c.g2 = from_molecule(m2.with_pose(unit_bond_coordinates(m2)), true);
  c.cert1 = graph_properties(c.g1);
  c.cert2 = graph_properties(c.g2);
  c.features1 = features::extract(m1.topology());
  c.features2 = features::extract(m2.topology());
  return c;
}

}  // namespace sbdd::expressivity
