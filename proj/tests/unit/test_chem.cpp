#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sbdd/chem/fingerprint.hpp"
#include "sbdd/chem/ligand_io.hpp"
#include "sbdd/chem/smiles.hpp"
#include "sbdd/error.hpp"
#include "sbdd/rng.hpp"

using namespace sbdd;
using namespace sbdd::chem;

namespace {

std::vector<int> degree_sequence(const MolecularGraph& m) {
  std::vector<int> d;
  for (int i = 0; i < m.n_atoms(); ++i) d.push_back(node_degree(m.topology(), i));
  std::sort(d.rbegin(), d.rend());
  return d;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  rng.shuffle(p);
  return p;
}

}  // namespace

TEST(Smiles, Decalin) {
  const auto m = parse_smiles("C1CCC2CCCCC2C1");
  EXPECT_EQ(m.n_atoms(), 10);
  EXPECT_EQ(m.bonds().size(), 11u);
  for (Element e : m.atoms()) EXPECT_EQ(e, Element::C);
  for (const Bond& b : m.bonds()) EXPECT_EQ(b.order, 1);
}

TEST(Smiles, SingleAtom) {
  const auto m = parse_smiles("C");
  EXPECT_EQ(m.n_atoms(), 1);
  EXPECT_TRUE(m.bonds().empty());
}

TEST(Smiles, AceticAcid) {
  const auto m = parse_smiles("CC(=O)O");
  const std::vector<Element> atoms{Element::C, Element::C, Element::O, Element::O};
  const std::vector<Bond> bonds{{0, 1, 1}, {1, 2, 2}, {1, 3, 1}};
  EXPECT_EQ(m.atoms(), atoms);
  EXPECT_EQ(m.bonds(), bonds);
}

TEST(Smiles, Errors) {
  auto offset_of = [](const char* s) -> long {
    try {
      parse_smiles(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  EXPECT_EQ(offset_of("C1CC"), 1);       // unclosed ring digit 1
  EXPECT_EQ(offset_of("CC(C"), 2);       // unbalanced parenthesis
  EXPECT_EQ(offset_of("CC)C"), 2);
  EXPECT_EQ(offset_of("CXC"), 1);        // unknown symbol
  EXPECT_EQ(offset_of("c1ccccc1"), 0);   // aromatic rejected
  EXPECT_EQ(offset_of("=CC"), 0);        // leading bond
  EXPECT_EQ(offset_of("CC="), 2);        // trailing bond
  EXPECT_EQ(offset_of("C==C"), 2);       // doubled bond symbol
  EXPECT_EQ(offset_of("C=(C)"), 1);      // bond before a branch
  EXPECT_EQ(offset_of("C[NH4+]"), 1);    // brackets unsupported
  EXPECT_EQ(offset_of("C.C"), 1);
  EXPECT_EQ(offset_of(""), 0);
  try {
    parse_smiles("C1CC");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unclosed ring digit 1"), std::string::npos);
  }
}

TEST(Smiles, RingClosureBondOrders) {
  const auto m = parse_smiles("C=1CCCCC1");
  EXPECT_EQ(m.bonds().back().order, 2);
  const auto m2 = parse_smiles("C1CCCCC=1");
  EXPECT_EQ(m2.bonds().back().order, 2);
  EXPECT_THROW(parse_smiles("C=1CCCCC#1"), ParseError);
  EXPECT_THROW(parse_smiles("C11"), ParseError);
  EXPECT_THROW(parse_smiles("C1C1"), ParseError);  // duplicate bond
}

// Hand-derived atom counts, bond counts and order-weighted degree sequences.
struct Curated {
  const char* smiles;
  int atoms;
  int bonds;
  std::vector<int> degrees;
};

TEST(Smiles, CuratedDegreeSequencesAndRingCounts) {
  const std::vector<Curated> cases = {
      {"C", 1, 0, {0}},
      {"CC", 2, 1, {1, 1}},
      {"C=C", 2, 1, {2, 2}},
      {"C#N", 2, 1, {3, 3}},
      {"CCO", 3, 2, {2, 1, 1}},
      {"CC(=O)O", 4, 3, {4, 2, 1, 1}},
      {"C1CCCCC1", 6, 6, {2, 2, 2, 2, 2, 2}},
      {"C1CCC2CCCCC2C1", 10, 11, {3, 3, 2, 2, 2, 2, 2, 2, 2, 2}},
      {"C1CCC(C1)C2CCCC2", 10, 11, {3, 3, 2, 2, 2, 2, 2, 2, 2, 2}},
      {"CC(C)(C)C", 5, 4, {4, 1, 1, 1, 1}},
      {"C1=CC=CC=C1", 6, 6, {3, 3, 3, 3, 3, 3}},
      {"O=C=O", 3, 2, {4, 2, 2}},
      {"ClCBr", 3, 2, {2, 1, 1}},
      {"FC(F)(F)F", 5, 4, {4, 1, 1, 1, 1}},
      {"N#CC#N", 4, 3, {4, 4, 3, 3}},
      {"C1CC1", 3, 3, {2, 2, 2}},
      {"C12CC1C2", 4, 5, {3, 3, 2, 2}},
      {"CCCCC", 5, 4, {2, 2, 2, 1, 1}},
      {"OCC(O)CO", 6, 5, {3, 2, 2, 1, 1, 1}},
      {"C1CCC2(CC1)CCCC2", 10, 11, {4, 2, 2, 2, 2, 2, 2, 2, 2, 2}},
      {"S(=O)(=O)(C)C", 5, 4, {6, 2, 2, 1, 1}},
      {"CP(=O)(O)O", 5, 4, {5, 2, 1, 1, 1}},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.smiles);
    const auto m = parse_smiles(c.smiles);
    EXPECT_EQ(m.n_atoms(), c.atoms);
    EXPECT_EQ(static_cast<int>(m.bonds().size()), c.bonds);
    EXPECT_EQ(degree_sequence(m), c.degrees);
    EXPECT_EQ(m.topology().n_edges() - m.n_atoms() + m.topology().n_components(), c.bonds - c.atoms + 1);
    EXPECT_TRUE(valence_ok(m));
  }
}

TEST(Smiles, WriterRoundTripsTopology) {
  for (const char* s : {"C1CCC2CCCCC2C1", "C1CCC(C1)C2CCCC2", "CC(=O)O", "C12CC1C2", "N#CC(Cl)C1=CC=CC=C1",
                        "C1CCC2(CC1)CCCC2", "S(=O)(=O)(C)C"}) {
    SCOPED_TRACE(s);
    const auto m = parse_smiles(s);
    const auto again = parse_smiles(write_smiles(m));
    EXPECT_EQ(again.n_atoms(), m.n_atoms());
    EXPECT_EQ(degree_sequence(again), degree_sequence(m));
    EXPECT_EQ(fingerprint(again), fingerprint(m));
  }
}

TEST(Degree, Examples) {
  const UnlabelledGraph g(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 2}});
  EXPECT_EQ(node_degree(g, 0), 4);
  const UnlabelledGraph isolated(2, {});
  EXPECT_EQ(node_degree(isolated, 1), 0);
  EXPECT_THROW(node_degree(isolated, 2), ValidationError);
  // decalin fusion atoms: incident orders {1,1,1}
  const auto decalin = parse_smiles("C1CCC2CCCCC2C1");
  std::vector<int> fusion;
  for (int i = 0; i < 10; ++i) {
    int incident = 0;
    for (const Bond& b : decalin.bonds()) incident += (b.i == i || b.j == i) ? b.order : 0;
    EXPECT_EQ(node_degree(decalin.topology(), i), incident);
    if (incident == 3) fusion.push_back(i);
  }
  EXPECT_EQ(fusion.size(), 2u);
}

TEST(Valence, Table) {
  auto carbon_with = [](int n_neighbors) {
    std::vector<Element> atoms(static_cast<std::size_t>(n_neighbors + 1), Element::C);
    std::vector<Bond> bonds;
    for (int k = 1; k <= n_neighbors; ++k) bonds.push_back({0, k, 1});
    return MolecularGraph(atoms, bonds);
  };
  EXPECT_TRUE(valence_ok(carbon_with(4)));
  EXPECT_FALSE(valence_ok(carbon_with(5)));
  auto oxygen_with = [](int n_neighbors) {
    std::vector<Element> atoms(static_cast<std::size_t>(n_neighbors + 1), Element::C);
    atoms[0] = Element::O;
    std::vector<Bond> bonds;
    for (int k = 1; k <= n_neighbors; ++k) bonds.push_back({0, k, 1});
    return MolecularGraph(atoms, bonds);
  };
  EXPECT_TRUE(valence_ok(oxygen_with(2)));
  EXPECT_FALSE(valence_ok(oxygen_with(3)));
  EXPECT_TRUE(valence_ok(parse_smiles("C1CCC2CCCCC2C1")));
  EXPECT_FALSE(valence_ok(parse_smiles("C=O=C")));
}

TEST(Valence, InvariantUnderRelabeling) {
  Rng rng(11);
  for (const char* s : {"C=O=C", "CC(=O)O", "FC(F)(F)(F)F", "C1CCC2CCCCC2C1"}) {
    const auto m = parse_smiles(s);
    for (int t = 0; t < 10; ++t) {
      EXPECT_EQ(valence_ok(permute(m, random_permutation(m.n_atoms(), rng))), valence_ok(m)) << s;
    }
  }
}

TEST(Graph, InvariantsEnforced) {
  EXPECT_THROW(UnlabelledGraph(2, {{0, 2, 1}}), ValidationError);
  EXPECT_THROW(UnlabelledGraph(2, {{1, 1, 1}}), ValidationError);
  EXPECT_THROW(UnlabelledGraph(2, {{0, 1, 1}, {1, 0, 2}}), ValidationError);
  EXPECT_THROW(UnlabelledGraph(2, {{0, 1, 4}}), ValidationError);
  EXPECT_THROW(MolecularGraph({Element::C}, std::vector<Bond>{}, Coords::Zero(3, 2)), ValidationError);
}

TEST(StripLabels, Examples) {
  const auto u = strip_labels(parse_smiles("CC"));
  EXPECT_EQ(u.n_nodes(), 2);
  ASSERT_EQ(u.edges().size(), 1u);
  EXPECT_EQ(u.edges()[0], (Bond{0, 1, 1}));
  const auto d = strip_labels(parse_smiles("C1CCC2CCCCC2C1"));
  EXPECT_EQ(d.n_nodes(), 10);
  EXPECT_EQ(d.n_edges(), 11);
}

TEST(StripLabels, RoundTripOverRandomLabellings) {
  Rng rng(3);
  const auto u = strip_labels(parse_smiles("C1CCC(C1)C2CCCC2"));
  for (int t = 0; t < 50; ++t) {
    std::vector<Element> atoms;
    for (int i = 0; i < u.n_nodes(); ++i) atoms.push_back(kElements[rng.below(kElements.size())]);
    EXPECT_EQ(strip_labels(label(u, atoms)), u);
  }
}

// Independent path enumeration: explicit atom sequences, BFS over partial
// paths, canonical key built from the sequence and its reverse.
std::multiset<std::string> path_keys_oracle(const MolecularGraph& m) {
  std::multiset<std::string> keys;
  std::vector<std::vector<int>> frontier;
  for (int i = 0; i < m.n_atoms(); ++i) frontier.push_back({i});
  auto bond_order = [&](int a, int b) {
    for (const Bond& bd : m.bonds()) {
      if ((bd.i == a && bd.j == b) || (bd.i == b && bd.j == a)) return bd.order;
    }
    return 0;
  };
  auto key_of = [&](const std::vector<int>& path) {
    std::string k;
    for (std::size_t t = 0; t < path.size(); ++t) {
      if (t > 0) k += std::to_string(bond_order(path[t - 1], path[t])) + "|";
      k += std::string(symbol(m.atom(path[t]))) + "|";
    }
    return k;
  };
  for (int len = 0; len <= kFingerprintMaxPath; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& path : frontier) {
      std::vector<int> rev(path.rbegin(), path.rend());
      if (path.front() <= path.back()) keys.insert(std::min(key_of(path), key_of(rev)));
      for (int j = 0; j < m.n_atoms(); ++j) {
        if (bond_order(path.back(), j) == 0) continue;
        if (std::find(path.begin(), path.end(), j) != path.end()) continue;
        auto ext = path;
        ext.push_back(j);
        next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
  }
  return keys;
}

TEST(Fingerprint, MatchesPathEnumerationOracle) {
  for (const char* s : {"C1CCC2CCCCC2C1", "C1CCC(C1)C2CCCC2", "CC(=O)O", "N#CC(Cl)C1=CC=CC=C1"}) {
    const auto m = parse_smiles(s);
    Fingerprint expected;
    const auto keys = path_keys_oracle(m);
    for (auto it = keys.begin(); it != keys.end(); it = keys.upper_bound(*it)) {
      for (std::size_t k = 1; k <= keys.count(*it); ++k) {
        expected.bits.set(stable_hash(*it + std::to_string(k)) % kFingerprintBits);
      }
    }
    EXPECT_EQ(fingerprint(m), expected) << s;
  }
}

TEST(Fingerprint, TanimotoExamples) {
  const auto f = fingerprint(parse_smiles("CC(=O)O"));
  EXPECT_EQ(tanimoto(f, f), 1.0);
  EXPECT_EQ(tanimoto(fingerprint(parse_smiles("C")), fingerprint(parse_smiles("O"))), 0.0);
  EXPECT_EQ(tanimoto(Fingerprint{}, Fingerprint{}), 1.0);

  // Oracle: Jaccard over hashed oracle key sets.
  auto oracle_bits = [](const char* s) {
    std::set<std::size_t> bits;
    std::map<std::string, int> seen;
    for (const auto& k : path_keys_oracle(parse_smiles(s))) {
      bits.insert(stable_hash(k + std::to_string(++seen[k])) % kFingerprintBits);
    }
    return bits;
  };
  const auto a = oracle_bits("C1CCC2CCCCC2C1");
  const auto b = oracle_bits("C1CCC(C1)C2CCCC2");
  std::vector<std::size_t> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  const double expected = static_cast<double>(inter.size()) / static_cast<double>(uni.size());
  const double t = tanimoto(fingerprint(parse_smiles("C1CCC2CCCCC2C1")), fingerprint(parse_smiles("C1CCC(C1)C2CCCC2")));
  EXPECT_DOUBLE_EQ(t, expected);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 1.0);
}

TEST(Fingerprint, PropertiesOverRandomMolecules) {
  Rng rng(5);
  const std::vector<const char*> pool = {"C1CCC2CCCCC2C1", "C1CCC(C1)C2CCCC2", "CC(=O)O", "OCC(O)CO", "CCCCC",
                                         "N#CC#N", "C1CCC2(CC1)CCCC2", "CP(=O)(O)O", "FC(F)(F)F", "C1=CC=CC=C1"};
  std::vector<MolecularGraph> mols;
  for (const char* s : pool) {
    const auto m = parse_smiles(s);
    mols.push_back(m);
    std::vector<Element> atoms = m.atoms();
    for (auto& a : atoms) {
      if (rng.uniform() < 0.3) a = rng.uniform() < 0.5 ? Element::N : Element::O;
    }
    mols.push_back(label(m.topology(), atoms));
  }
  for (const auto& a : mols) {
    const auto fa = fingerprint(a);
    EXPECT_EQ(tanimoto(fa, fa), 1.0);
    for (int t = 0; t < 5; ++t) EXPECT_EQ(fingerprint(permute(a, random_permutation(a.n_atoms(), rng))), fa);
    for (const auto& b : mols) {
      const auto fb = fingerprint(b);
      const double ab = tanimoto(fa, fb);
      EXPECT_EQ(ab, tanimoto(fb, fa));
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, 1.0);
    }
  }
}

TEST(LigandIo, SkipsBadLines) {
  std::istringstream in(
      "{\"id\": \"a\", \"smiles\": \"CCO\"}\n"
      "{\"id\": \"b\", \"smiles\": \"c1ccccc1\"}\n"
      "\n"
      "{\"id\": \"c\", \"smiles\": \"C=O=C\"}\n"
      "not json\n"
      "{\"id\": \"d\", \"smiles\": \"C1CCC2CCCCC2C1\"}\n");
  const auto file = read_ligands(in);
  ASSERT_EQ(file.entries.size(), 2u);
  EXPECT_EQ(file.entries[0].id, "a");
  EXPECT_EQ(file.entries[1].molecule.n_atoms(), 10);
  EXPECT_EQ(file.skipped, 3);
}
