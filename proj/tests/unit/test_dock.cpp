#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "sbdd/bench/synth.hpp"
#include "sbdd/chem/smiles.hpp"
#include "sbdd/dock/bfgs.hpp"
#include "sbdd/dock/oracle.hpp"
#include "sbdd/error.hpp"

using namespace sbdd;
using namespace sbdd::dock;
using chem::parse_smiles;

namespace {

// Direct transcription of the kernel suite for one residue/atom pair.
double pair_oracle(double d, double r_atom, bool hydrophobic) {
  if (d >= 8.0) return 0.0;
  const double s = d - 3.0 - r_atom;
  double e = -0.035 * std::exp(-std::pow(s / 0.5, 2)) - 0.005 * std::exp(-std::pow((s - 3.0) / 2.0, 2));
  if (s < 0) e += 0.840 * s * s;
  if (hydrophobic) {
    double h = 0.0;
    if (s <= 0.5) h = 1.0;
    else if (s < 1.5) h = 1.0 - 3.0 * std::pow(s - 0.5, 2) + 2.0 * std::pow(s - 0.5, 3);
    e += -0.035 * h;
  }
  double taper = 1.0;
  if (d > 7.0) taper = 1.0 - 3.0 * std::pow(d - 7.0, 2) + 2.0 * std::pow(d - 7.0, 3);
  return e * taper;
}

affinity::PocketGraph one_residue(int type) {
  affinity::Residue r;
  r.type = type;
  return affinity::build_pocket_graph({r});
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  return rotation_from_uniforms(rng.uniform(), rng.uniform(), rng.uniform()).toRotationMatrix();
}

}  // namespace

TEST(Bfgs, MinimizesRosenbrock) {
  const Objective rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    if (g) *g = Eigen::Vector2d(-2.0 * a - 400.0 * x[0] * b, 200.0 * b);
    return a * a + 100.0 * b * b;
  };
  BfgsOptions opt;
  opt.max_iters = 500;
  const auto r = minimize_bfgs(rosen, Eigen::Vector2d(-1.2, 1.0), opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Bfgs, NonFiniteObjectiveThrows) {
  const Objective bad = [](const Eigen::VectorXd&, Eigen::VectorXd* g) {
    if (g) *g = Eigen::VectorXd::Constant(1, std::nan(""));
    return 0.0;
  };
  EXPECT_THROW(minimize_bfgs(bad, Eigen::VectorXd::Zero(1)), NumericError);
}

TEST(Embed, DiatomicSpring) {
  const auto m = parse_smiles("CC");
  const Pose p = generate_pose(m, 1);
  EXPECT_NEAR((p.col(0) - p.col(1)).norm(), 1.5, 0.05);
}

TEST(Embed, RingAndChainConstraints) {
  for (const char* s : {"C1CCCCC1", "C1CCC2CCCCC2C1", "CC(C)(C)CC(=O)OCC1CCNCC1", "C1CC1", "OC1CCC(CC1)C2CCCCC2"}) {
    const auto m = parse_smiles(s);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Pose p = generate_pose(m, seed);
      ASSERT_EQ(p.cols(), m.n_atoms());
      EXPECT_LT(centroid(p).norm(), 1e-9);
      for (const auto& b : m.bonds()) {
        const double d = (p.col(b.i) - p.col(b.j)).norm();
        EXPECT_GE(d, 1.3) << s;
        EXPECT_LE(d, 1.7) << s;
      }
      for (int i = 0; i < m.n_atoms(); ++i) {
        for (int j = i + 1; j < m.n_atoms(); ++j) EXPECT_GE((p.col(i) - p.col(j)).norm(), 0.9) << s;
      }
      Pose g;
      embedding_energy(m, p, &g);
      EXPECT_LT(g.colwise().norm().maxCoeff(), 1e-3);
    }
  }
}

TEST(Embed, DeterministicAndVariable) {
  const auto m = parse_smiles("CCCC(CC)CCOCCN");
  EXPECT_EQ(generate_pose(m, 4), generate_pose(m, 4));
  std::vector<Pose> poses;
  for (std::uint64_t s = 0; s < 20; ++s) poses.push_back(generate_pose(m, s));
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    for (std::size_t j = i + 1; j < poses.size(); ++j) {
      sum += best_fit_rmsd(poses[i], poses[j]);
      ++pairs;
    }
  }
  const double mean = sum / pairs;
  EXPECT_GT(mean, 0.3);
  EXPECT_LT(mean, 3.0);
}

TEST(Embed, RejectsDisconnected) {
  const chem::MolecularGraph m({chem::Element::C, chem::Element::C}, std::vector<chem::Bond>{});
  EXPECT_THROW(generate_pose(m, 0), ValidationError);
}

TEST(Interaction, MatchesPairOracle) {
  const InteractionWeights w;
  for (int type : {0, 1}) {
    const auto pocket = one_residue(type);
    for (const char* s : {"C", "N", "O", "S", "F", "P"}) {
      const auto m = parse_smiles(s);
      for (double d = 0.5; d < 9.0; d += 0.0625) {
        Pose p(3, 1);
        p << d, 0.0, 0.0;
        const bool hyd = type == 0 && std::string(s) == "C";
        const double expected = pair_oracle(d, element_radius(m.atom(0)), hyd);
        EXPECT_NEAR(interaction_score(w, pocket, m, p), expected, 1e-14 * std::max(1.0, std::abs(expected)));
      }
    }
  }
}

TEST(Interaction, FarAwayIsExactlyZero) {
  Rng rng(1);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 25, "p");
  const auto m = parse_smiles("CC(C)CCOC1CCCCC1");
  Pose p = generate_pose(m, 2);
  p.colwise() += pocket.centroid() + Eigen::Vector3d(100.0, 0.0, 0.0);
  EXPECT_EQ(interaction_score(w, pocket, m, p), 0.0);
}

TEST(Interaction, RigidMotionAndPermutationInvariant) {
  Rng rng(2);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 25, "p");
  const auto m = parse_smiles("CC(C)CCOC1CCNCC1");
  Pose p = generate_pose(m, 3);
  p.colwise() += pocket.centroid();
  const double base = interaction_score(w, pocket, m, p);
  EXPECT_NE(base, 0.0);
  const Eigen::Matrix3d r = random_rotation(rng);
  const Eigen::Vector3d t(3.0, -7.0, 11.0);
  const Pose moved = (r * p).colwise() + t;
  EXPECT_NEAR(interaction_score(w, affinity::transformed(pocket, r, t), m, moved), base, 1e-12);

  std::vector<int> perm(static_cast<std::size_t>(m.n_atoms()));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  Pose pp(3, m.n_atoms());
  for (int i = 0; i < m.n_atoms(); ++i) pp.col(perm[i]) = p.col(i);
  EXPECT_NEAR(interaction_score(w, pocket, chem::permute(m, perm), pp), base, 1e-12);
  std::vector<int> rperm(static_cast<std::size_t>(pocket.size()));
  std::iota(rperm.begin(), rperm.end(), 0);
  rng.shuffle(rperm);
  EXPECT_NEAR(interaction_score(w, affinity::permuted(pocket, rperm), m, p), base, 1e-12);
}

TEST(Interaction, FieldMinimumBeatsThreeAngstromOut) {
  const InteractionWeights w;
  const auto pocket = one_residue(0);
  const auto m = parse_smiles("C");
  double best_d = 0.0, best = 1e300;
  for (double d = 3.0; d < 8.0; d += 1e-4) {
    const double e = pair_oracle(d, 1.9, true);
    if (e < best) best = e, best_d = d;
  }
  Pose at(3, 1), out(3, 1);
  at << best_d, 0, 0;
  out << best_d + 3.0, 0, 0;
  EXPECT_LT(interaction_score(w, pocket, m, at), interaction_score(w, pocket, m, out));
  EXPECT_NEAR(interaction_score(w, pocket, m, at), best, 1e-15);
}

TEST(Interaction, AtomGradientMatchesFiniteDifferences) {
  Rng rng(3);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 25, "p");
  const auto m = parse_smiles("CC(C)CCOC1CCNCC1");
  Pose p = generate_pose(m, 5);
  p.colwise() += pocket.centroid();
  Pose g;
  interaction_score(w, pocket, m, p, &g);
  double worst = 0.0;
  for (int j = 0; j < m.n_atoms(); ++j) {
    for (int k = 0; k < 3; ++k) {
      Pose a = p, b = p;
      a(k, j) += 1e-5;
      b(k, j) -= 1e-5;
      const double num = (interaction_score(w, pocket, m, a) - interaction_score(w, pocket, m, b)) / 2e-5;
      worst = std::max(worst, std::abs(num - g(k, j)) / std::max({std::abs(num), std::abs(g(k, j)), 1e-6}));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Docking, RigidAndTorsionGradientsMatchFiniteDifferences) {
  Rng rng(4);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 25, "p");
  const auto m = parse_smiles("CCC(C)CCOCC1CCNCC1");
  Pose p = generate_pose(m, 6);
  p.colwise() += pocket.centroid();
  for (bool torsions : {false, true}) {
    const DockingObjective f(w, pocket, m, p, torsions);
    if (torsions) EXPECT_GE(f.n_torsions(), 4);
    EXPECT_LT((f.place(Eigen::VectorXd::Zero(f.dim())) - p).cwiseAbs().maxCoeff(), 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd x(f.dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal(0.0, trial == 0 ? 1e-3 : 0.7);
      Eigen::VectorXd g;
      f(x, &g);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd a = x, b = x;
        a[i] += 1e-5;
        b[i] -= 1e-5;
        const double num = (f(a) - f(b)) / 2e-5;
        EXPECT_LT(std::abs(num - g[i]) / std::max({std::abs(num), std::abs(g[i]), 1e-6}), 1e-4)
            << "dof " << i << " torsions " << torsions;
      }
    }
  }
}

TEST(Docking, TorsionsPreserveBondLengths) {
  Rng rng(5);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 20, "p");
  const auto m = parse_smiles("CCCCCC(CC)CO");
  const Pose p = generate_pose(m, 1);
  const DockingObjective f(w, pocket, m, p, true);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(f.dim());
  for (Eigen::Index i = 6; i < x.size(); ++i) x[i] = rng.uniform(-3.0, 3.0);
  const Pose q = f.place(x);
  for (const auto& b : m.bonds()) {
    EXPECT_NEAR((q.col(b.i) - q.col(b.j)).norm(), (p.col(b.i) - p.col(b.j)).norm(), 1e-12);
  }
}

TEST(Redock, NeverWorseAndStableAtMinimum) {
  Rng rng(6);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 28, "p");
  const auto m = parse_smiles("CC(C)CCOC1CCNCC1");
  Pose p = generate_pose(m, 7);
  p.colwise() += pocket.centroid();
  const auto r = redock(w, pocket, m, p);
  EXPECT_LE(r.score, r.initial_score + 1e-9);
  EXPECT_NEAR(interaction_score(w, pocket, m, r.pose), r.score, 1e-12);
  EXPECT_LT(r.score, 0.0);

  DockConfig local;
  local.multistart = 1;
  local.mc_steps = 0;
  const auto again = redock(w, pocket, m, r.pose, local);
  EXPECT_NEAR(again.score, r.score, 1e-6);

  // known minimum displaced by 5 A, rigid-only
  const Pose shifted = r.pose.colwise() + Eigen::Vector3d(5.0, 0.0, 0.0).eval();
  const auto back = redock(w, pocket, m, shifted);
  EXPECT_LE(back.score, back.initial_score + 1e-9);
  EXPECT_NEAR(back.score, r.score, 1e-3);
}

TEST(Redock, FlexibleNeverWorse) {
  Rng rng(7);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 28, "p");
  const auto m = parse_smiles("CCCCC(CC)CCOCC");
  Pose p = generate_pose(m, 1);
  p.colwise() += pocket.centroid();
  DockConfig cfg;
  cfg.rigid_only = false;
  cfg.mc_steps = 3;
  const auto r = redock(w, pocket, m, p, cfg);
  EXPECT_LE(r.score, r.initial_score + 1e-9);
  EXPECT_NEAR(interaction_score(w, pocket, m, r.pose), r.score, 1e-12);
}

TEST(SurrogateVina, DeterministicPerSeed) {
  Rng rng(8);
  const InteractionWeights w;
  const auto pocket = bench::random_pocket(rng, 24, "p");
  const auto m = parse_smiles("OCC1CCC(CC1)NC");
  EXPECT_EQ(surrogate_vina(w, pocket, m, 11), surrogate_vina(w, pocket, m, 11));
  EXPECT_LT(surrogate_vina(w, pocket, m, 11), 0.0);
}

TEST(Weights, JsonRoundTripAndErrors) {
  const auto w = weights_from_json(R"({"version": 1, "w": [-0.1, -0.2, 0.3, -0.4]})");
  EXPECT_EQ(w.w[3], -0.4);
  EXPECT_THROW(weights_from_json(R"({"version": 2, "w": [0,0,0,0]})"), ValidationError);
  EXPECT_THROW(weights_from_json(R"({"version": 1, "w": [0,0,0]})"), ValidationError);
  EXPECT_THROW(weights_from_json("not json"), ValidationError);
}
