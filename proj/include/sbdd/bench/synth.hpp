#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbdd/affinity/training.hpp"
#include "sbdd/chem/ligand_io.hpp"
#include "sbdd/dock/oracle.hpp"

namespace sbdd::bench {

/// Residues on an ellipsoidal shell with semi-axes drawn from
/// [axis_min, axis_max], at least `min_spacing` apart where possible;
/// residue types uniform over the 20 amino acids. Directions within the
/// cap cos(angle to the local +z axis) > mouth_cos are left empty, so the
/// pocket opens to the solvent on one side.
struct PocketShape {
  double axis_min = 6.5;
  double axis_max = 9.5;
  double min_spacing = 3.8;
  double mouth_cos = 0.6;
};

affinity::PocketGraph random_pocket(Rng& rng, int n_residues, std::string id, const PocketShape& shape = {});

/// Connected, valence-satisfying random molecule with `n_atoms` heavy
/// atoms: a random tree, a few 5-7 membered ring closures and occasional
/// double bonds.
chem::MolecularGraph random_molecule(Rng& rng, int n_atoms);

/// `count` random molecules written as ligand entries "lig<i>" with sizes
/// drawn uniformly from [min_atoms, max_atoms].
std::vector<chem::LigandEntry> random_ligand_db(Rng& rng, int count, int min_atoms = 5, int max_atoms = 35);

struct SynthConfig {
  int n_pockets = 20;
  int min_residues = 20;
  int max_residues = 36;
  std::filesystem::path ligand_db_path;  // empty: generate a random db
  int extras_per_pocket = 50;
  std::uint64_t seed = 0;
  dock::DockConfig oracle;
  dock::InteractionWeights weights;
  int threads = 1;
  int reference_draws = 3;
};

struct ReferenceLigand {
  std::string pocket_id;
  std::string ligand_id;
  std::string smiles;
  double score = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();  // of the redocked pose
};

struct SynthDataset {
  std::vector<affinity::PocketGraph> pockets;
  std::vector<affinity::AffinityRecord> records;
  std::vector<std::string> record_smiles;  // aligned with records
  std::vector<ReferenceLigand> references;
};

/// Per pocket: one reference ligand plus extras_per_pocket random db
/// ligands, each labelled by surrogate_vina started at the pocket centroid.
/// The reference is the best-scoring of a few db draws, and its redocked
/// centre of mass is the target for the COM model. Deterministic per seed.
/// Throws ValidationError when the db has fewer than extras + reference
/// draws usable entries.
SynthDataset synth_dataset(const SynthConfig& cfg, const std::vector<chem::LigandEntry>& db);

/// Pockets and records with a known size law: the label is
///   -6 + 0.02 (n - s*)^2 + noise,  s* = 8 + 40 h,
/// h being the pocket's hydrophobic residue fraction and n the ligand's
/// node count. No docking is involved.
struct PlantedConfig {
  int n_pockets = 40;
  int residues = 20;
  int ligands_per_pocket = 40;
  int min_atoms = 5;
  int max_atoms = 40;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

struct PlantedDataset {
  affinity::PocketMap pockets;
  std::vector<std::string> pocket_order;
  std::vector<affinity::AffinityRecord> records;
  std::map<std::string, double> optimum;  // s* per pocket
};

double planted_optimum(const affinity::PocketGraph& g);
double planted_label(double optimum, int n_nodes);
PlantedDataset planted_dataset(const PlantedConfig& cfg);

}  // namespace sbdd::bench
