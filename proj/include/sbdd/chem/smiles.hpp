#pragma once

#include <string>
#include <string_view>

#include "sbdd/chem/molecule.hpp"

namespace sbdd::chem {

/// Parses the supported SMILES subset: uppercase organic-subset atoms
/// (C N O F P S Cl Br I), branches, ring-closure digits 1-9 and the bond
/// symbols - = #. Everything else (aromatic atoms, brackets, charges,
/// stereo, disconnected '.') is rejected with a ParseError carrying the
/// byte offset of the offending character.
MolecularGraph parse_smiles(std::string_view smiles);

/// Writes a connected molecule back to the same subset. Not canonical:
/// the atom order of the graph determines the string. Throws
/// ValidationError for disconnected graphs or when more than nine ring
/// closures would be open at once.
std::string write_smiles(const MolecularGraph& m);

}  // namespace sbdd::chem
