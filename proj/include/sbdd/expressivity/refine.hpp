#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sbdd/affinity/pocket.hpp"
#include "sbdd/chem/molecule.hpp"
#include "sbdd/features.hpp"
#include "sbdd/geometry.hpp"

namespace sbdd::expressivity {

struct FeaturedEdge {
  int u = 0;
  int v = 0;
  std::string feature;
};

/// Undirected graph with string tokens on nodes and edges and optional
/// coordinates (needed for LU3D refinement).
class FeaturedGraph {
 public:
  FeaturedGraph() = default;
  /// Throws ValidationError on bad indices, self loops, repeated pairs or a
  /// coordinate block whose width differs from the node count.
  FeaturedGraph(std::vector<std::string> nodes, std::vector<FeaturedEdge> edges,
                std::optional<Coords> coords = std::nullopt);

  int n_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  int n_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<FeaturedEdge>& edges() const noexcept { return edges_; }
  const std::optional<Coords>& coords() const noexcept { return coords_; }

  struct Incident {
    int node;
    int edge;
  };
  const std::vector<Incident>& neighbors(int v) const { return adjacency_.at(static_cast<std::size_t>(v)); }

  /// Plain topology with single bonds.
  chem::UnlabelledGraph topology() const;

 private:
  std::vector<std::string> nodes_;
  std::vector<FeaturedEdge> edges_;
  std::optional<Coords> coords_;
  std::vector<std::vector<Incident>> adjacency_;
};

/// Elements as node tokens and bond orders as edge tokens; with `uniform`
/// every token is the same. The pose, when present, becomes the coordinates.
FeaturedGraph from_molecule(const chem::MolecularGraph& m, bool uniform = false);

/// Residue types as node tokens over the symmetrized neighbourhood graph,
/// residue centres as coordinates.
FeaturedGraph from_pocket(const affinity::PocketGraph& g);

enum class Mode { LU, LU3D };

std::string_view mode_name(Mode m) noexcept;

/// Canonical ids for computation-tree encodings. An id is the 64-bit digest
/// of the encoding; a digest already taken by a different encoding is
/// probed forward, so ids are injective over everything registered.
class ColorRegistry {
 public:
  using Digest = std::uint64_t (*)(const std::string&);
  ColorRegistry();
  explicit ColorRegistry(Digest digest) : digest_(digest) {}

  std::uint64_t id(const std::string& encoding);
  std::size_t size() const noexcept { return by_encoding_.size(); }
  std::size_t collisions() const noexcept { return collisions_; }

 private:
  std::unordered_map<std::string, std::uint64_t> by_encoding_;
  std::unordered_map<std::uint64_t, const std::string*> by_id_;
  std::size_t collisions_ = 0;
  Digest digest_;
};

/// colors[l][v]: colour of node v at depth l = 0..L.
struct ColorHistory {
  std::vector<std::vector<std::uint64_t>> colors;

  int depth() const noexcept { return static_cast<int>(colors.size()) - 1; }
  /// Sorted colours at depth l.
  std::vector<std::uint64_t> multiset(int l) const;
  /// Number of colour classes at depth l.
  std::size_t classes(int l) const;
};

/// Depth 0 colours the node token; depth l+1 colours (own colour, sorted
/// multiset of (neighbour colour, edge token[, distance rounded to 1e-6])).
/// Throws ValidationError when LU3D is asked for without coordinates.
ColorHistory color_refine(const FeaturedGraph& g, int L, Mode mode, ColorRegistry& registry);
ColorHistory color_refine(const FeaturedGraph& g, int L, Mode mode);

struct Verdict {
  bool indistinguishable = false;
  int depth = 0;                            // L checked, or the separating depth
  std::vector<std::pair<int, int>> pairing;  // (node in g1, node in g2)
};

/// Compares per-depth colour multisets for l <= L, L defaulting to
/// 2 max(|V1|, |V2|). On success pairs nodes of equal final colour.
Verdict indistinguishable(const FeaturedGraph& g1, const FeaturedGraph& g2, Mode mode, int L = -1);

struct PropertyCertificate {
  int girth = 0;           // 0 for forests
  int largest_cycle = 0;   // 0 for forests
  int cut_edges = 0;
  bool conjoined_cycles = false;  // two simple cycles sharing an edge
  int cycle_count = 0;
};

inline constexpr int kMaxCertificateNodes = 32;

/// Exhaustive simple-cycle enumeration plus bridge finding. Throws
/// ValidationError above 32 nodes.
PropertyCertificate graph_properties(const FeaturedGraph& g);

using CrossEdgeRule = std::function<std::string(const std::string&, const std::string&)>;

/// Nodes of p then nodes of g, their edges, and an edge between every node
/// of p and every node of g with the token rule(p token, g token).
/// Coordinates are kept when both inputs have them.
FeaturedGraph build_complex(const FeaturedGraph& p, const FeaturedGraph& g, const CrossEdgeRule& rule);

struct Prop1Result {
  Verdict ligands;
  Verdict complexes;
  bool holds = false;
};

/// Checks that g1 and g2 are LU-indistinguishable (ValidationError if not)
/// and then whether their complexes with p are too.
Prop1Result verify_prop1(const FeaturedGraph& p, const FeaturedGraph& g1, const FeaturedGraph& g2,
                         const CrossEdgeRule& rule, int L = -1);

struct CertifiedPair {
  std::string smiles1 = "C1CCC2CCCCC2C1";
  std::string smiles2 = "C1CCC(C1)C2CCCC2";
  FeaturedGraph g1;
  FeaturedGraph g2;
  PropertyCertificate cert1;
  PropertyCertificate cert2;
  features::StructuralFeatures features1;
  features::StructuralFeatures features2;
};

/// Fused and linked bicyclic pair with uniform tokens and coordinates in
/// which every bond has length 1 to within 1e-9.
CertifiedPair certified_pair();

/// Embedded conformer rescaled and relaxed until every bond has unit
/// length; throws NumericError if that fails.
Coords unit_bond_coordinates(const chem::MolecularGraph& m, std::uint64_t seed = 0);

}  // namespace sbdd::expressivity
