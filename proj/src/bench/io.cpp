#include "sbdd/bench/io.hpp"

#include <fstream>
#include <sstream>

#include "sbdd/chem/smiles.hpp"
#include "sbdd/error.hpp"

namespace sbdd::bench {

namespace {

template <class F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  const auto text = read_text(path);
  return guarded("invalid JSON in " + path.string(), [&] { return json::parse(text); });
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

json pocket_to_json(const affinity::PocketGraph& g) {
  json res = json::array();
  for (const auto& r : g.residues) {
    res.push_back({{"type", affinity::kAminoAcids.at(static_cast<std::size_t>(r.type))},
                   {"center", {r.center.x(), r.center.y(), r.center.z()}}});
  }
  return {{"id", g.id}, {"residues", res}};
}

affinity::PocketGraph pocket_from_json(const json& j) {
  return guarded("malformed pocket", [&] {
    std::vector<affinity::Residue> res;
    for (const auto& r : j.at("residues")) {
      affinity::Residue x;
      x.type = affinity::amino_acid_index(r.at("type").get<std::string>());
      x.center = vec3(r.at("center"));
      res.push_back(x);
    }
    return affinity::build_pocket_graph(std::move(res), j.value("id", std::string{}));
  });
}

std::vector<affinity::PocketGraph> read_pockets(const std::filesystem::path& path) {
  const auto j = read_json(path);
  std::vector<affinity::PocketGraph> out;
  if (j.is_array()) {
    for (const auto& p : j) out.push_back(pocket_from_json(p));
  } else {
    out.push_back(pocket_from_json(j));
  }
  if (out.empty()) throw ValidationError("no pockets in " + path.string());
  return out;
}

void write_pockets(const std::filesystem::path& path, const std::vector<affinity::PocketGraph>& pockets) {
  json arr = json::array();
  for (const auto& p : pockets) arr.push_back(pocket_to_json(p));
  write_json(path, arr);
}

affinity::PocketMap pocket_map(const std::vector<affinity::PocketGraph>& pockets) {
  affinity::PocketMap m;
  for (const auto& p : pockets) {
    if (!m.emplace(p.id, p).second) throw ValidationError("duplicate pocket id '" + p.id + "'");
  }
  return m;
}

json features_to_json(const features::StructuralFeatures& f) {
  return {{"n_nodes", f.n_nodes}, {"n_rings", f.n_rings}, {"n_rotatable", f.n_rotatable}, {"diameter", f.diameter}};
}

features::StructuralFeatures features_from_json(const json& j) {
  return guarded("malformed features", [&] {
    return features::StructuralFeatures{j.at("n_nodes").get<int>(), j.at("n_rings").get<int>(),
                                        j.at("n_rotatable").get<int>(), j.at("diameter").get<int>()};
  });
}

json molecule_to_json(const chem::MolecularGraph& m) {
  json atoms = json::array(), bonds = json::array();
  for (auto e : m.atoms()) atoms.push_back(chem::symbol(e));
  for (const auto& b : m.bonds()) bonds.push_back({b.i, b.j, b.order});
  return {{"smiles", chem::write_smiles(m)}, {"atoms", atoms}, {"bonds", bonds}};
}

chem::MolecularGraph molecule_from_json(const json& j) {
  return guarded("malformed molecule", [&] {
    if (!j.contains("atoms")) return chem::parse_smiles(j.at("smiles").get<std::string>());
    std::vector<chem::Element> atoms;
    for (const auto& a : j.at("atoms")) {
      const auto e = chem::element_from_symbol(a.get<std::string>());
      if (!e) throw ValidationError("unknown element '" + a.get<std::string>() + "'");
      atoms.push_back(*e);
    }
    std::vector<chem::Bond> bonds;
    for (const auto& b : j.at("bonds")) bonds.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>()});
    return chem::MolecularGraph(std::move(atoms), std::move(bonds));
  });
}

json coords_to_json(const Coords& x) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < x.cols(); ++i) arr.push_back({x(0, i), x(1, i), x(2, i)});
  return arr;
}

Coords coords_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("coordinates must be an array");
  Coords x(3, static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = vec3(j[i]);
  return x;
}

void write_dataset(const std::filesystem::path& dir, const SynthDataset& ds) {
  std::filesystem::create_directories(dir);
  write_pockets(dir / "pockets.json", ds.pockets);
  std::ofstream rec(dir / "records.jsonl", std::ios::binary);
  if (!rec) throw ValidationError("cannot write " + (dir / "records.jsonl").string());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    json j{{"pocket_id", r.pocket_id},
           {"ligand_id", r.ligand_id},
           {"features", features_to_json(r.features)},
           {"label", r.label}};
    if (i < ds.record_smiles.size()) j["smiles"] = ds.record_smiles[i];
    rec << j.dump() << '\n';
  }
  json refs = json::array();
  for (const auto& r : ds.references) {
    refs.push_back({{"pocket_id", r.pocket_id},
                    {"ligand_id", r.ligand_id},
                    {"smiles", r.smiles},
                    {"score", r.score},
                    {"com", {r.com.x(), r.com.y(), r.com.z()}}});
  }
  write_json(dir / "references.json", refs);
}

SynthDataset read_dataset(const std::filesystem::path& dir) {
  SynthDataset ds;
  for (auto& p : read_pockets(dir / "pockets.json")) ds.pockets.push_back(std::move(p));
  std::istringstream rec(read_text(dir / "records.jsonl"));
  std::string line;
  int lineno = 0;
  while (std::getline(rec, line)) {
    ++lineno;
    if (line.empty()) continue;
    guarded("records.jsonl line " + std::to_string(lineno), [&] {
      const auto j = json::parse(line);
      ds.records.push_back({j.at("pocket_id").get<std::string>(), j.at("ligand_id").get<std::string>(),
                            features_from_json(j.at("features")), j.at("label").get<double>()});
      ds.record_smiles.push_back(j.value("smiles", std::string{}));
      return 0;
    });
  }
  if (std::filesystem::exists(dir / "references.json")) {
    for (const auto& r : read_json(dir / "references.json")) {
      guarded("references.json", [&] {
        ds.references.push_back({r.at("pocket_id").get<std::string>(), r.at("ligand_id").get<std::string>(),
                                 r.at("smiles").get<std::string>(), r.at("score").get<double>(), vec3(r.at("com"))});
        return 0;
      });
    }
  }
  return ds;
}

json candidate_to_json(const design::Candidate& c, const std::string& pocket_id) {
  json j{{"pocket_id", pocket_id},
         {"molecule", molecule_to_json(c.molecule)},
         {"pose", coords_to_json(c.pose)},
         {"predicted_score", c.predicted_score},
         {"template_index", c.template_index},
         {"properties", c.properties}};
  return j;
}

design::Candidate candidate_from_json(const json& j, std::string* pocket_id) {
  return guarded("malformed candidate", [&] {
    design::Candidate c;
    c.molecule = molecule_from_json(j.at("molecule"));
    if (j.contains("pose")) c.pose = coords_from_json(j.at("pose"));
    if (c.pose.cols() != 0 && c.pose.cols() != c.molecule.n_atoms()) {
      throw ValidationError("candidate pose has " + std::to_string(c.pose.cols()) + " atoms, molecule has " +
                            std::to_string(c.molecule.n_atoms()));
    }
    c.predicted_score = j.value("predicted_score", 0.0);
    c.template_index = j.value("template_index", std::size_t{0});
    if (j.contains("properties")) c.properties = j.at("properties").get<std::map<std::string, double>>();
    if (pocket_id) *pocket_id = j.value("pocket_id", std::string{});
    return c;
  });
}

void write_candidates(std::ostream& out, const std::vector<design::Candidate>& cs, const std::string& pocket_id) {
  for (const auto& c : cs) out << candidate_to_json(c, pocket_id).dump() << '\n';
}

CandidateFile read_candidates(const std::filesystem::path& path) {
  CandidateFile f;
  std::istringstream in(read_text(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = guarded(path.string() + " line " + std::to_string(lineno), [&] { return json::parse(line); });
    std::string id;
    auto c = candidate_from_json(j, &id);
    if (!f.by_pocket.count(id)) f.pocket_ids.push_back(id);
    f.by_pocket[id].push_back(std::move(c));
  }
  if (f.pocket_ids.empty()) throw ValidationError("no candidates in " + path.string());
  return f;
}

}  // namespace sbdd::bench
