#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "sbdd/bench/synth.hpp"
#include "sbdd/chem/smiles.hpp"
#include "sbdd/design/atoms.hpp"
#include "sbdd/design/pipeline.hpp"
#include "sbdd/design/structures.hpp"
#include "sbdd/error.hpp"

using namespace sbdd;
using namespace sbdd::design;
using chem::Element;
using chem::parse_smiles;

namespace {

// Chi-square critical values at p = 0.01.
constexpr double kChi2Df2 = 9.210;
constexpr double kChi2Df4 = 13.277;

StructureDb random_db(Rng& rng, int n_mols, bool dedup = true) {
  StructureDb db(dedup);
  for (int i = 0; i < n_mols; ++i) db.add(bench::random_molecule(rng, rng.between(4, 30)).topology());
  return db;
}

// Entries with pairwise distinct feature tuples, so their scores differ.
StructureDb distinct_feature_db(Rng& rng, std::size_t want) {
  StructureDb db(false);
  std::set<std::array<int, 4>> seen;
  while (db.size() < want) {
    const auto u = bench::random_molecule(rng, rng.between(4, 35)).topology();
    const auto f = features::extract(u);
    if (seen.insert({f.n_nodes, f.n_rings, f.n_rotatable, f.diameter}).second) db.add(u);
  }
  return db;
}

std::set<std::vector<int>> brute_force_automorphisms(const chem::UnlabelledGraph& u) {
  std::vector<int> p(static_cast<std::size_t>(u.n_nodes()));
  std::iota(p.begin(), p.end(), 0);
  std::set<std::vector<int>> out;
  do {
    if (chem::permute(u, p) == u) out.insert(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

TEST(Percentile, Examples) {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 0.0);
  EXPECT_EQ(percentile_window(s), std::make_pair(4.0, 9.0));
  EXPECT_EQ(percentile_window({2.5, 2.5, 2.5, 2.5}), std::make_pair(2.5, 2.5));
  EXPECT_EQ(percentile_window({30.0, 10.0, 20.0}), std::make_pair(10.0, 10.0));
  EXPECT_EQ(percentile_window({7.0}, 0.0, 100.0), std::make_pair(7.0, 7.0));
  EXPECT_THROW(percentile_window({}), ValidationError);
  EXPECT_THROW(percentile_window({1.0}, 10.0, 5.0), ValidationError);
}

TEST(Percentile, WideningNeverShrinksEligibleSet) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(rng.between(1, 300)));
    for (double& x : s) x = std::round(rng.normal() * 4.0) / 2.0;
    auto count = [&](double lo, double hi) {
      const auto [a, b] = percentile_window(s, lo, hi);
      return std::count_if(s.begin(), s.end(), [&](double x) { return x >= a && x <= b; });
    };
    const double lo = rng.uniform(0, 50), hi = lo + rng.uniform(0, 50);
    EXPECT_LE(count(lo, hi), count(std::max(0.0, lo - 3.0), std::min(100.0, hi + 3.0)));
  }
}

TEST(StructureDb, DedupAndRejection) {
  StructureDb db;
  EXPECT_TRUE(db.add(parse_smiles("CCO").topology()));
  EXPECT_FALSE(db.add(parse_smiles("OCC").topology()));
  EXPECT_EQ(db.duplicates(), 1);
  EXPECT_TRUE(db.add(parse_smiles("CC=O").topology()));  // degree sequence differs
  EXPECT_FALSE(db.add(chem::UnlabelledGraph(2, {})));
  // a node of order-weighted degree 7
  std::vector<chem::Bond> bonds;
  for (int i = 1; i <= 5; ++i) bonds.push_back({0, i, 1});
  bonds.push_back({0, 6, 2});
  EXPECT_FALSE(db.add(chem::UnlabelledGraph(7, bonds)));
  EXPECT_EQ(db.rejected(), 2);
  EXPECT_EQ(db.size(), 2u);
  StructureDb keep_all(false);
  keep_all.add(parse_smiles("CCO").topology());
  keep_all.add(parse_smiles("OCC").topology());
  EXPECT_EQ(keep_all.size(), 2u);
}

TEST(SampleStructure, AlwaysInsideWindow) {
  Rng rng(2);
  const auto db = random_db(rng, 300);
  const auto scorer = affinity::make_scorer(rng);
  const auto pocket = bench::random_pocket(rng, 20, "p");
  const StructureSampler s(db, scorer, pocket);
  const auto [lo, hi] = s.window();
  for (int i = 0; i < 10000; ++i) {
    const double v = s.scores()[s.draw(rng)];
    ASSERT_GE(v, lo);
    ASSERT_LE(v, hi);
  }
  const auto u = sample_structure(db, pocket, scorer, rng);
  const double v = affinity::score(scorer, features::extract(u), pocket);
  EXPECT_GE(v, lo);
  EXPECT_LE(v, hi);
}

TEST(SampleStructure, UniformOverThreeEligible) {
  Rng rng(3);
  const auto db = distinct_feature_db(rng, 40);
  const auto scorer = affinity::make_scorer(rng);
  const auto pocket = bench::random_pocket(rng, 20, "p");
  const StructureSampler s(db, scorer, pocket);
  ASSERT_EQ(s.eligible().size(), 3u);  // ranks ceil(2)..ceil(4)
  std::map<std::size_t, int> counts;
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++counts[s.draw(rng)];
  double chi2 = 0.0;
  for (const auto& [idx, c] : counts) chi2 += std::pow(c - draws / 3.0, 2) / (draws / 3.0);
  EXPECT_LT(chi2, kChi2Df2);
}

TEST(SampleStructure, FullWindowCoversDb) {
  Rng rng(4);
  const auto db = random_db(rng, 60);
  const auto scorer = affinity::make_scorer(rng);
  const auto pocket = bench::random_pocket(rng, 20, "p");
  const StructureSampler s(db, scorer, pocket, 0.0, 100.0);
  EXPECT_EQ(s.eligible().size(), db.size());
  EXPECT_THROW(StructureSampler(StructureDb(), scorer, pocket), ValidationError);
}

TEST(AtomTable, CountsFromCorpus) {
  std::vector<chem::MolecularGraph> corpus(20, parse_smiles("CCO"));
  const auto t = build_atom_table(corpus);
  const auto& d1 = t.distribution(1);
  EXPECT_DOUBLE_EQ(d1[static_cast<std::size_t>(Element::C)], 0.5);
  EXPECT_DOUBLE_EQ(d1[static_cast<std::size_t>(Element::O)], 0.5);
  EXPECT_DOUBLE_EQ(t.distribution(2)[static_cast<std::size_t>(Element::C)], 1.0);
  EXPECT_FALSE(t.observed(3));
  // fallback: uniform over C, N, P, S
  const auto& d3 = t.distribution(3);
  for (Element e : {Element::C, Element::N, Element::P, Element::S}) EXPECT_DOUBLE_EQ(d3[static_cast<std::size_t>(e)], 0.25);
  EXPECT_DOUBLE_EQ(d3[static_cast<std::size_t>(Element::O)], 0.0);
  EXPECT_THROW(t.distribution(7), ValidationError);
  EXPECT_THROW(build_atom_table({}), ValidationError);
}

TEST(AtomTable, MatchesCountingOracleAndValence) {
  Rng rng(5);
  std::vector<chem::MolecularGraph> corpus;
  for (int i = 0; i < 100; ++i) corpus.push_back(bench::random_molecule(rng, rng.between(3, 30)));
  const auto t = build_atom_table(corpus);
  std::map<int, std::map<Element, double>> counts;
  std::map<int, double> totals;
  for (const auto& m : corpus) {
    for (int i = 0; i < m.n_atoms(); ++i) {
      const int d = chem::node_degree(m.topology(), i);
      counts[d][m.atom(i)] += 1;
      totals[d] += 1;
    }
  }
  for (const auto& [d, row] : counts) {
    double sum = 0.0;
    for (std::size_t e = 0; e < chem::kElements.size(); ++e) {
      const double expected = row.count(chem::kElements[e]) ? row.at(chem::kElements[e]) / totals[d] : 0.0;
      EXPECT_NEAR(t.distribution(d)[e], expected, 1e-12);
      sum += t.distribution(d)[e];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  for (int d = 0; d <= kMaxDegree; ++d) {
    for (std::size_t e = 0; e < chem::kElements.size(); ++e) {
      if (chem::max_valence(chem::kElements[e]) < d) EXPECT_EQ(t.distribution(d)[e], 0.0);
    }
  }
  EXPECT_EQ(t.distribution(4)[static_cast<std::size_t>(Element::O)], 0.0);
}

TEST(SampleAtoms, DegreeZeroFrequencies) {
  AtomTable t;
  AtomTable::Row row{};
  row[static_cast<std::size_t>(Element::C)] = 0.7;
  row[static_cast<std::size_t>(Element::N)] = 0.2;
  row[static_cast<std::size_t>(Element::O)] = 0.1;
  t.set_row(0, row);
  Rng rng(6);
  const chem::UnlabelledGraph u(1, {});
  std::map<Element, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[sample_atoms(u, t, rng).atom(0)];
  for (auto [e, p] : {std::pair{Element::C, 0.7}, {Element::N, 0.2}, {Element::O, 0.1}}) {
    EXPECT_LE(std::abs(counts[e] - n * p), 3.0 * std::sqrt(n * p * (1 - p)));
  }
  EXPECT_EQ(counts.size(), 3u);
}

TEST(SampleAtoms, ValidAndStructurePreserving) {
  Rng rng(7);
  std::vector<chem::MolecularGraph> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back(bench::random_molecule(rng, rng.between(3, 30)));
  const auto t = build_atom_table(corpus);
  const auto ring = parse_smiles("C1CCCCC1").topology();
  for (int i = 0; i < 200; ++i) {
    const auto m = sample_atoms(ring, t, rng);
    EXPECT_TRUE(chem::valence_ok(m));
    EXPECT_EQ(parse_smiles(chem::write_smiles(m)).n_atoms(), 6);
  }
  int ok = 0;
  const int total = 10000;
  for (int i = 0; i < total; ++i) {
    const auto u = bench::random_molecule(rng, rng.between(1, 30)).topology();
    const auto m = sample_atoms(u, t, rng);
    ok += chem::valence_ok(m) && chem::strip_labels(m) == u;
  }
  EXPECT_EQ(ok, total);
}

TEST(SampleAtoms, NodesAreIndependent) {
  AtomTable t;
  AtomTable::Row row{};
  row[static_cast<std::size_t>(Element::C)] = 0.6;
  row[static_cast<std::size_t>(Element::N)] = 0.25;
  row[static_cast<std::size_t>(Element::O)] = 0.15;
  t.set_row(2, row);
  const auto ring = parse_smiles("C1CCCCC1").topology();
  Rng rng(8);
  const int n = 20000;
  std::map<std::pair<Element, Element>, double> joint;
  std::map<Element, double> m0, m3;
  for (int i = 0; i < n; ++i) {
    const auto m = sample_atoms(ring, t, rng);
    joint[{m.atom(0), m.atom(3)}] += 1;
    m0[m.atom(0)] += 1;
    m3[m.atom(3)] += 1;
  }
  double chi2 = 0.0;
  for (const auto& [a, ca] : m0) {
    for (const auto& [b, cb] : m3) {
      const double expected = ca * cb / n;
      const double obs = joint.count({a, b}) ? joint[{a, b}] : 0.0;
      chi2 += (obs - expected) * (obs - expected) / expected;
    }
  }
  EXPECT_LT(chi2, kChi2Df4);
}

TEST(SampleAtoms, RejectsDegreeAboveSix) {
  std::vector<chem::Bond> bonds;
  for (int i = 1; i <= 7; ++i) bonds.push_back({0, i, 1});
  Rng rng(9);
  EXPECT_THROW(sample_atoms(chem::UnlabelledGraph(8, bonds), AtomTable(), rng), ValidationError);
}

TEST(Automorphisms, MatchBruteForce) {
  Rng rng(10);
  std::vector<chem::UnlabelledGraph> graphs{parse_smiles("C1CCCCC1").topology(), parse_smiles("CC(C)(C)C").topology(),
                                            parse_smiles("C1CC1C2CC2").topology(), parse_smiles("CC=CC").topology(),
                                            parse_smiles("C").topology()};
  for (int i = 0; i < 20; ++i) graphs.push_back(bench::random_molecule(rng, rng.between(2, 7)).topology());
  for (const auto& u : graphs) {
    const auto a = automorphisms(u);
    EXPECT_TRUE(a.complete);
    const std::set<std::vector<int>> got(a.maps.begin(), a.maps.end());
    EXPECT_EQ(got.size(), a.maps.size());
    EXPECT_EQ(got, brute_force_automorphisms(u));
  }
  EXPECT_EQ(automorphisms(parse_smiles("C1CCCCC1").topology()).maps.size(), 12u);
}

TEST(EnumerateUnique, SingleNodeStopsEarly) {
  std::vector<chem::MolecularGraph> corpus{parse_smiles("C"), parse_smiles("O"), parse_smiles("N")};
  const auto t = build_atom_table(corpus);
  Rng rng(11);
  const auto e = enumerate_unique(chem::UnlabelledGraph(1, {}), t, 1000, rng);
  EXPECT_TRUE(e.stopped_early);
  EXPECT_EQ(e.molecules.size(), 3u);
}

TEST(EnumerateUnique, TenNodeTemplateReachesThousand) {
  AtomTable t;
  AtomTable::Row row{};
  row[static_cast<std::size_t>(Element::C)] = 0.5;
  row[static_cast<std::size_t>(Element::N)] = 0.25;
  row[static_cast<std::size_t>(Element::O)] = 0.25;
  for (int d = 0; d <= 2; ++d) t.set_row(d, row);
  const auto u = parse_smiles("CCCC1CCC(C)CC1").topology();
  ASSERT_EQ(u.n_nodes(), 10);
  Rng rng(12);
  const auto e = enumerate_unique(u, t, 1000, rng);
  ASSERT_EQ(e.molecules.size(), 1000u);
  EXPECT_FALSE(e.stopped_early);
  // no two outputs related by a symmetry of the template
  const auto aut = automorphisms(u);
  std::set<std::vector<Element>> seen;
  for (const auto& m : e.molecules) {
    EXPECT_TRUE(chem::strip_labels(m) == u);
    for (const auto& p : aut.maps) {
      std::vector<Element> img(10);
      for (int i = 0; i < 10; ++i) img[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = m.atom(i);
      EXPECT_EQ(seen.count(img), 0u);
    }
    seen.insert(m.atoms());
  }
}

TEST(Properties, BuiltinsAndObjective) {
  Candidate c;
  c.molecule = parse_smiles("C1CCNCC1CO");
  c.predicted_score = -3.0;
  const PropertyRegistry reg;
  EXPECT_DOUBLE_EQ(reg.evaluate("size_penalty", c), -17.0 / 25.0);
  EXPECT_DOUBLE_EQ(reg.evaluate("ring_bonus", c), 0.25);
  EXPECT_DOUBLE_EQ(reg.evaluate("hetero_fraction", c), 2.0 / 8.0);
  EXPECT_DOUBLE_EQ(reg.evaluate("score", c), -3.0);
  EXPECT_THROW(reg.evaluate("qed", c), ValidationError);
  const auto obj = parse_objective("ring_bonus=5,hetero_fraction=1");
  EXPECT_DOUBLE_EQ(objective_value(obj, c, reg), 1.5);
  EXPECT_THROW(parse_objective("ring_bonus"), ValidationError);
  EXPECT_THROW(parse_objective("ring_bonus=x"), ValidationError);
  EXPECT_THROW(parse_objective(""), ValidationError);
}

TEST(OptimizeProperties, Contracts) {
  std::vector<Candidate> cs(5);
  const char* smiles[] = {"CCO", "C1CCCCC1", "CCN", "CCCCCCCC", "OCCO"};
  for (int i = 0; i < 5; ++i) {
    cs[i].molecule = parse_smiles(smiles[i]);
    cs[i].predicted_score = std::vector<double>{-1, -4, -2, -5, -3}[i];
  }
  EXPECT_EQ(optimize_properties({cs[2]}, {{"score", -1.0}}), 0u);
  EXPECT_EQ(optimize_properties(cs, {{"score", -1.0}}), 3u);
  // CCO and CCN tie on every term below; the earlier one wins
  EXPECT_EQ(optimize_properties({cs[0], cs[2]}, {{"size_penalty", 1.0}, {"hetero_fraction", 1.0}}), 0u);
  EXPECT_THROW(optimize_properties(cs, {{"nope", 1.0}}), ValidationError);
  EXPECT_THROW(optimize_properties({}, {{"score", 1.0}}), ValidationError);
}

TEST(OptimizeProperties, DominatorWinsUnderShuffles) {
  Rng rng(13);
  std::vector<Candidate> cs(12);
  for (auto& c : cs) {
    c.molecule = bench::random_molecule(rng, rng.between(4, 12));
    c.predicted_score = rng.uniform(-2.0, 0.0);
  }
  Candidate dom;
  dom.molecule = parse_smiles("NC1CC2CC3CC4CC(O)C4CC3CC2CC1CN");  // 25 atoms, 4 rings
  dom.predicted_score = -10.0;
  cs.push_back(dom);
  const Objective obj{{"size_penalty", 1.0}, {"ring_bonus", 1.0}, {"hetero_fraction", 0.2}, {"score", -1.0}};
  for (int trial = 0; trial < 100; ++trial) {
    rng.shuffle(cs);
    EXPECT_DOUBLE_EQ(cs[optimize_properties(cs, obj)].predicted_score, -10.0);
  }
}

namespace {

struct Fixture {
  StructureDb db;
  AtomTable atoms;
  affinity::ScorerParams scorer;
  affinity::ComParams com;
  affinity::PocketGraph pocket;
  Pipeline pipeline() const { return {&db, &atoms, &scorer, &com}; }
};

Fixture make_fixture(std::uint64_t seed) {
  Rng rng(seed);
  Fixture f;
  std::vector<chem::MolecularGraph> corpus;
  for (int i = 0; i < 400; ++i) {
    corpus.push_back(bench::random_molecule(rng, rng.between(4, 30)));
    f.db.add(corpus.back().topology());
  }
  f.atoms = build_atom_table(corpus);
  f.scorer = affinity::make_scorer(rng);
  f.com = affinity::make_com_model(rng);
  f.pocket = bench::random_pocket(rng, 24, "p");
  return f;
}

}  // namespace

TEST(Generate, CandidatesHonourEveryContract) {
  const auto f = make_fixture(14);
  const Rng rng(77);
  const auto cands = generate(f.pipeline(), f.pocket, 30, rng);
  ASSERT_EQ(cands.size(), 30u);
  const StructureSampler s(f.db, f.scorer, f.pocket);
  const auto [lo, hi] = s.window();
  const Eigen::Vector3d com = affinity::predict_com(f.com, f.pocket);
  for (const auto& c : cands) {
    EXPECT_TRUE(chem::valence_ok(c.molecule));
    EXPECT_TRUE(chem::strip_labels(c.molecule) == f.db[c.template_index].graph);
    const double v = affinity::score(f.scorer, features::extract(c.molecule.topology()), f.pocket);
    EXPECT_EQ(v, c.predicted_score);
    EXPECT_GE(v, lo);
    EXPECT_LE(v, hi);
    EXPECT_LT((centroid(c.pose) - com).norm(), 1e-9);
    EXPECT_EQ(c.properties.size(), 4u);
  }
  const auto again = generate(f.pipeline(), f.pocket, 30, rng);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    EXPECT_EQ(cands[i].molecule.atoms(), again[i].molecule.atoms());
    EXPECT_EQ(cands[i].pose, again[i].pose);
  }
  // a prefix is reproduced by a shorter run
  const auto few = generate(f.pipeline(), f.pocket, 3, rng);
  for (std::size_t i = 0; i < few.size(); ++i) EXPECT_EQ(few[i].pose, cands[i].pose);
}

TEST(Generate, PropertyOptimizedBeatsPlainOnObjective) {
  const auto f = make_fixture(15);
  const Rng rng(5);
  const auto obj = parse_objective("ring_bonus=1,hetero_fraction=1");
  const auto plain = generate(f.pipeline(), f.pocket, 20, rng);
  const auto po = generate_po(f.pipeline(), f.pocket, 20, obj, 50, rng);
  const PropertyRegistry reg;
  double a = 0, b = 0;
  for (const auto& c : plain) a += objective_value(obj, c, reg);
  for (const auto& c : po) b += objective_value(obj, c, reg);
  EXPECT_GT(b, a);
}

TEST(Repurpose, WindowRanks) {
  Rng rng(16);
  const auto db = distinct_feature_db(rng, 200);
  const auto scorer = affinity::make_scorer(rng);
  const auto pocket = bench::random_pocket(rng, 20, "p");
  const auto scores = affinity::score_batch(scorer, db.features(), pocket);
  std::vector<std::size_t> rank(db.size());
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  std::set<std::size_t> allowed(rank.begin() + 10, rank.begin() + 20);  // positions 11..20

  const auto res = repurpose_scan(pocket, db, scorer, 100, Rng(1));
  EXPECT_EQ(res.scanned, 200u);
  EXPECT_EQ(res.hits.size(), 10u);
  ASSERT_TRUE(res.note.has_value());
  for (const auto& h : res.hits) EXPECT_TRUE(allowed.count(h.index));
  for (std::size_t i = 1; i < res.hits.size(); ++i) EXPECT_LE(res.hits[i - 1].score, res.hits[i].score);

  const auto few = repurpose_scan(pocket, db, scorer, 4, Rng(1));
  EXPECT_EQ(few.hits.size(), 4u);
  EXPECT_FALSE(few.note.has_value());
  const auto sub = repurpose_scan(pocket, db, scorer, 4, Rng(1), 50);
  EXPECT_EQ(sub.scanned, 50u);
  EXPECT_THROW(repurpose_scan(pocket, StructureDb(), scorer, 4, Rng(1)), ValidationError);
}
