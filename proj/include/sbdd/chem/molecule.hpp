#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sbdd/geometry.hpp"

namespace sbdd::chem {

enum class Element : std::uint8_t { C, N, O, F, P, S, Cl, Br, I };

inline constexpr std::array<Element, 9> kElements = {Element::C,  Element::N, Element::O,
                                                     Element::F,  Element::P, Element::S,
                                                     Element::Cl, Element::Br, Element::I};

std::string_view symbol(Element e) noexcept;
std::optional<Element> element_from_symbol(std::string_view s) noexcept;

/// Neutral organic valence: C 4, N 3, O 2, F 1, P 5, S 6, halogens 1.
int max_valence(Element e) noexcept;

struct Bond {
  int i = 0;
  int j = 0;
  int order = 1;

  friend bool operator==(const Bond&, const Bond&) = default;
};

struct Neighbor {
  int node = 0;
  int order = 1;
};

/// Topology with bond orders; no elements, no coordinates.
class UnlabelledGraph {
 public:
  UnlabelledGraph() = default;
  /// Throws ValidationError on out-of-range indices, self loops, duplicate
  /// unordered pairs or bond orders outside 1..3.
  UnlabelledGraph(int n_nodes, std::vector<Bond> edges);

  int n_nodes() const noexcept { return n_nodes_; }
  int n_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Bond>& edges() const noexcept { return edges_; }
  const std::vector<Neighbor>& neighbors(int i) const { return adjacency_.at(static_cast<std::size_t>(i)); }

  /// Number of connected components (0 for the empty graph).
  int n_components() const;
  bool connected() const { return n_components() == 1; }

  /// Same node count and the same set of (unordered pair, order) edges.
  friend bool operator==(const UnlabelledGraph& a, const UnlabelledGraph& b);

 private:
  int n_nodes_ = 0;
  std::vector<Bond> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Sum of bond orders incident to node i. Throws ValidationError when i is
/// out of range.
int node_degree(const UnlabelledGraph& g, int i);

/// Heavy-atom molecular graph; hydrogens are implicit and never stored.
class MolecularGraph {
 public:
  MolecularGraph() = default;
  MolecularGraph(std::vector<Element> atoms, std::vector<Bond> bonds, std::optional<Coords> pose = std::nullopt);
  MolecularGraph(std::vector<Element> atoms, UnlabelledGraph topology, std::optional<Coords> pose = std::nullopt);

  int n_atoms() const noexcept { return static_cast<int>(atoms_.size()); }
  const std::vector<Element>& atoms() const noexcept { return atoms_; }
  Element atom(int i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  const std::vector<Bond>& bonds() const noexcept { return topology_.edges(); }
  const UnlabelledGraph& topology() const noexcept { return topology_; }
  const std::optional<Coords>& pose() const noexcept { return pose_; }

  MolecularGraph with_pose(Coords pose) const;

 private:
  void check_pose() const;

  std::vector<Element> atoms_;
  UnlabelledGraph topology_;
  std::optional<Coords> pose_;
};

bool valence_ok(const MolecularGraph& m);

/// Drops elements and pose; topology and bond orders are preserved.
inline UnlabelledGraph strip_labels(const MolecularGraph& m) { return m.topology(); }

/// Attaches elements to a topology. Throws ValidationError on size mismatch.
MolecularGraph label(const UnlabelledGraph& u, std::vector<Element> atoms);

/// Relabels node indices: node i of the input becomes node perm[i].
MolecularGraph permute(const MolecularGraph& m, const std::vector<int>& perm);
UnlabelledGraph permute(const UnlabelledGraph& g, const std::vector<int>& perm);

}  // namespace sbdd::chem
