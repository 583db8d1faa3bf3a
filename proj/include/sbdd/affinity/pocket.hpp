#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sbdd/geometry.hpp"
#include "sbdd/nn/egnn.hpp"

namespace sbdd::affinity {

inline constexpr std::array<std::string_view, 20> kAminoAcids = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"};

inline constexpr double kPocketCutoff = 15.0;
inline constexpr int kMaxNeighbors = 24;

/// Index into kAminoAcids; throws ValidationError for unknown codes.
int amino_acid_index(std::string_view code);

struct Residue {
  int type = 0;  // index into kAminoAcids
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

/// Residue-level pocket graph. Node v receives messages from N(v): the (at
/// most 24) nearest residues within 15 A, ties broken by lower index.
struct PocketGraph {
  std::string id;
  std::vector<Residue> residues;
  nn::EdgeIndex edges;  // src in N(dst)

  int size() const noexcept { return static_cast<int>(residues.size()); }
  Coords coords() const;
  Eigen::MatrixXd one_hot() const;  // 20 x n
  Eigen::Vector3d centroid() const { return sbdd::centroid(coords()); }
};

/// Throws ValidationError on empty input or non-finite coordinates.
PocketGraph build_pocket_graph(std::vector<Residue> residues, std::string id = {});

/// Applies x -> R x + t to every residue and rebuilds the graph.
PocketGraph transformed(const PocketGraph& g, const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

/// Reorders residues (residue i moves to slot perm[i]) and rebuilds.
PocketGraph permuted(const PocketGraph& g, const std::vector<int>& perm);

}  // namespace sbdd::affinity
