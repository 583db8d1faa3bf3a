#include "sbdd/chem/ligand_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "sbdd/chem/smiles.hpp"
#include "sbdd/error.hpp"

namespace sbdd::chem {

LigandFile read_ligands(std::istream& in) {
  LigandFile file;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LigandEntry entry;
      entry.id = j.at("id").get<std::string>();
      entry.smiles = j.at("smiles").get<std::string>();
      entry.molecule = parse_smiles(entry.smiles);
      if (!valence_ok(entry.molecule)) throw ValidationError("valence violation");
      file.entries.push_back(std::move(entry));
    } catch (const std::exception& e) {
      spdlog::warn("ligand file line {}: skipped ({})", line_no, e.what());
      ++file.skipped;
    }
  }
  return file;
}

LigandFile read_ligands(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open ligand file " + path.string());
  return read_ligands(in);
}

void write_ligands(std::ostream& out, const std::vector<LigandEntry>& entries) {
  for (const LigandEntry& e : entries) {
    out << nlohmann::json{{"id", e.id}, {"smiles", e.smiles}}.dump() << '\n';
  }
}

}  // namespace sbdd::chem
