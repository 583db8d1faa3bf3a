#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sbdd/chem/molecule.hpp"

namespace sbdd::chem {

struct LigandEntry {
  std::string id;
  std::string smiles;
  MolecularGraph molecule;
};

struct LigandFile {
  std::vector<LigandEntry> entries;
  int skipped = 0;
};

/// Reads JSON Lines of {"id": ..., "smiles": ...}. Lines that fail to parse
/// or violate valence are skipped with a logged warning and counted.
LigandFile read_ligands(std::istream& in);
LigandFile read_ligands(const std::filesystem::path& path);

void write_ligands(std::ostream& out, const std::vector<LigandEntry>& entries);

}  // namespace sbdd::chem
