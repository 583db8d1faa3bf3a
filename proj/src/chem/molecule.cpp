#include "sbdd/chem/molecule.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "sbdd/error.hpp"

namespace sbdd::chem {

std::string_view symbol(Element e) noexcept {
  switch (e) {
    case Element::C: return "C";
    case Element::N: return "N";
    case Element::O: return "O";
    case Element::F: return "F";
    case Element::P: return "P";
    case Element::S: return "S";
    case Element::Cl: return "Cl";
    case Element::Br: return "Br";
    case Element::I: return "I";
  }
  return "?";
}

std::optional<Element> element_from_symbol(std::string_view s) noexcept {
  for (Element e : kElements) {
    if (symbol(e) == s) return e;
  }
  return std::nullopt;
}

int max_valence(Element e) noexcept {
  switch (e) {
    case Element::C: return 4;
    case Element::N: return 3;
    case Element::O: return 2;
    case Element::P: return 5;
    case Element::S: return 6;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I: return 1;
  }
  return 0;
}

UnlabelledGraph::UnlabelledGraph(int n_nodes, std::vector<Bond> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)), adjacency_(static_cast<std::size_t>(std::max(n_nodes, 0))) {
  if (n_nodes < 0) throw ValidationError("negative node count");
  std::set<std::pair<int, int>> seen;
  for (const Bond& b : edges_) {
    if (b.i < 0 || b.j < 0 || b.i >= n_nodes || b.j >= n_nodes) {
      throw ValidationError("bond index out of range: (" + std::to_string(b.i) + ", " + std::to_string(b.j) + ")");
    }
    if (b.i == b.j) throw ValidationError("self loop on node " + std::to_string(b.i));
    if (b.order < 1 || b.order > 3) throw ValidationError("bond order must be 1..3, got " + std::to_string(b.order));
    if (!seen.emplace(std::min(b.i, b.j), std::max(b.i, b.j)).second) {
      throw ValidationError("duplicate bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) + ")");
    }
    adjacency_[static_cast<std::size_t>(b.i)].push_back({b.j, b.order});
    adjacency_[static_cast<std::size_t>(b.j)].push_back({b.i, b.order});
  }
}

int UnlabelledGraph::n_components() const {
  std::vector<int> parent(static_cast<std::size_t>(n_nodes_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  int components = n_nodes_;
  for (const Bond& b : edges_) {
    const int a = find(b.i);
    const int c = find(b.j);
    if (a != c) {
      parent[static_cast<std::size_t>(a)] = c;
      --components;
    }
  }
  return components;
}

namespace {

std::vector<Bond> normalized(const std::vector<Bond>& edges) {
  std::vector<Bond> out;
  out.reserve(edges.size());
  for (const Bond& b : edges) out.push_back({std::min(b.i, b.j), std::max(b.i, b.j), b.order});
  std::sort(out.begin(), out.end(), [](const Bond& a, const Bond& b) {
    return std::tie(a.i, a.j, a.order) < std::tie(b.i, b.j, b.order);
  });
  return out;
}

}  // namespace

bool operator==(const UnlabelledGraph& a, const UnlabelledGraph& b) {
  return a.n_nodes_ == b.n_nodes_ && normalized(a.edges_) == normalized(b.edges_);
}

int node_degree(const UnlabelledGraph& g, int i) {
  if (i < 0 || i >= g.n_nodes()) throw ValidationError("node index " + std::to_string(i) + " out of range");
  int degree = 0;
  for (const Neighbor& nb : g.neighbors(i)) degree += nb.order;
  return degree;
}

MolecularGraph::MolecularGraph(std::vector<Element> atoms, std::vector<Bond> bonds, std::optional<Coords> pose)
    : atoms_(std::move(atoms)), pose_(std::move(pose)) {
  topology_ = UnlabelledGraph(n_atoms(), std::move(bonds));
  check_pose();
}

MolecularGraph::MolecularGraph(std::vector<Element> atoms, UnlabelledGraph topology, std::optional<Coords> pose)
    : atoms_(std::move(atoms)), topology_(std::move(topology)), pose_(std::move(pose)) {
  if (topology_.n_nodes() != n_atoms()) {
    throw ValidationError("topology has " + std::to_string(topology_.n_nodes()) + " nodes but " +
                          std::to_string(n_atoms()) + " atoms were given");
  }
  check_pose();
}

void MolecularGraph::check_pose() const {
  if (pose_ && pose_->cols() != n_atoms()) {
    throw ValidationError("pose has " + std::to_string(pose_->cols()) + " points for " + std::to_string(n_atoms()) +
                          " atoms");
  }
}

MolecularGraph MolecularGraph::with_pose(Coords pose) const { return MolecularGraph(atoms_, topology_, std::move(pose)); }

bool valence_ok(const MolecularGraph& m) {
  for (int i = 0; i < m.n_atoms(); ++i) {
    if (node_degree(m.topology(), i) > max_valence(m.atom(i))) return false;
  }
  return true;
}

MolecularGraph label(const UnlabelledGraph& u, std::vector<Element> atoms) {
  if (static_cast<int>(atoms.size()) != u.n_nodes()) throw ValidationError("label count does not match node count");
  return MolecularGraph(std::move(atoms), u);
}

UnlabelledGraph permute(const UnlabelledGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n_nodes()) throw ValidationError("permutation size mismatch");
  std::vector<Bond> edges;
  edges.reserve(g.edges().size());
  for (const Bond& b : g.edges()) {
    edges.push_back({perm[static_cast<std::size_t>(b.i)], perm[static_cast<std::size_t>(b.j)], b.order});
  }
  return UnlabelledGraph(g.n_nodes(), std::move(edges));
}

MolecularGraph permute(const MolecularGraph& m, const std::vector<int>& perm) {
  UnlabelledGraph topo = permute(m.topology(), perm);
  std::vector<Element> atoms(m.atoms().size());
  std::optional<Coords> pose;
  if (m.pose()) pose = Coords(3, m.n_atoms());
  for (int i = 0; i < m.n_atoms(); ++i) {
    const int to = perm[static_cast<std::size_t>(i)];
    atoms[static_cast<std::size_t>(to)] = m.atom(i);
    if (pose) pose->col(to) = m.pose()->col(i);
  }
  return MolecularGraph(std::move(atoms), std::move(topo), std::move(pose));
}

}  // namespace sbdd::chem
