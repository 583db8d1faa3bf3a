#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbdd/affinity/pocket.hpp"
#include "sbdd/affinity/training.hpp"
#include "sbdd/bench/synth.hpp"
#include "sbdd/design/pipeline.hpp"

namespace sbdd::bench {

using nlohmann::json;

// Pockets: {"id": str, "residues": [{"type": "ALA", "center": [x, y, z]}, ...]}
json pocket_to_json(const affinity::PocketGraph& g);
affinity::PocketGraph pocket_from_json(const json& j);

/// A single pocket object, or an array of them.
std::vector<affinity::PocketGraph> read_pockets(const std::filesystem::path& path);
void write_pockets(const std::filesystem::path& path, const std::vector<affinity::PocketGraph>& pockets);

json features_to_json(const features::StructuralFeatures& f);
features::StructuralFeatures features_from_json(const json& j);

json molecule_to_json(const chem::MolecularGraph& m);
chem::MolecularGraph molecule_from_json(const json& j);

json coords_to_json(const Coords& x);
Coords coords_from_json(const json& j);

/// Dataset directory: pockets.json, records.jsonl, references.json.
void write_dataset(const std::filesystem::path& dir, const SynthDataset& ds);
SynthDataset read_dataset(const std::filesystem::path& dir);

affinity::PocketMap pocket_map(const std::vector<affinity::PocketGraph>& pockets);

/// Candidates as JSON Lines, one object per candidate with its pocket id.
json candidate_to_json(const design::Candidate& c, const std::string& pocket_id);
design::Candidate candidate_from_json(const json& j, std::string* pocket_id = nullptr);
void write_candidates(std::ostream& out, const std::vector<design::Candidate>& cs, const std::string& pocket_id);

struct CandidateFile {
  std::vector<std::string> pocket_ids;  // first-seen order
  std::map<std::string, std::vector<design::Candidate>> by_pocket;
};
CandidateFile read_candidates(const std::filesystem::path& path);

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
/// Writes pretty JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace sbdd::bench
