#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sbdd/affinity/pocket.hpp"
#include "sbdd/chem/molecule.hpp"
#include "sbdd/geometry.hpp"

namespace sbdd::dock {

/// Ligand heavy-atom coordinates, one column per atom.
using Pose = Coords;

inline constexpr int kWeightsVersion = 1;

/// Weights of the four interaction kernels, in order: gauss, gauss2,
/// repulsion, hydrophobic.
struct InteractionWeights {
  std::array<double, 4> w{-0.035, -0.005, 0.840, -0.035};
};

struct DockConfig {
  bool rigid_only = true;
  int multistart = 8;
  int max_iters = 200;
  double cutoff_angstrom = 8.0;
  double grad_tol = 1e-6;
  // per start: kick the local minimum by these scales and re-minimize
  int mc_steps = 20;
  double mc_shift = 1.0;  // Angstrom, per axis
  double mc_turn = 0.3;   // radians, per rotation/torsion component
};

/// Unit quaternion plus translation. Applied about a pivot p as
/// x -> R (x - p) + p + t.
struct RigidTransform {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

Pose apply(const RigidTransform& t, const Pose& pose, const Eigen::Vector3d& pivot);

double element_radius(chem::Element e) noexcept;
inline constexpr double kResidueRadius = 3.0;
bool hydrophobic_residue(int type) noexcept;

/// Raw kernel values at surface distance d' (distance minus radii sum).
struct KernelTerms {
  std::array<double, 4> value{};
  std::array<double, 4> slope{};  // derivative in d'
};
KernelTerms kernels(double surface_distance, bool hydrophobic_pair) noexcept;

/// C1 taper: 1 below cutoff - 1, 0 from cutoff on.
double taper(double d, double cutoff, double* slope = nullptr) noexcept;

/// Residue-atom interaction energy of a posed ligand; lower binds tighter.
/// When `grad` is given it receives dE/dx for every ligand atom.
double interaction_score(const InteractionWeights& w, const affinity::PocketGraph& pocket,
                         const chem::MolecularGraph& m, const Pose& pose, Pose* grad = nullptr,
                         double cutoff = 8.0);

/// Seeded spring embedding: BFS-layered start with jitter, relaxed with
/// 1.5 A bond springs and a 1.8 A soft non-bonded wall until the largest
/// force is below 1e-3. The pose is centred at the origin. Throws
/// NumericError on non-convergence after 5000 iterations, and
/// ValidationError for disconnected molecules.
Pose generate_pose(const chem::MolecularGraph& m, std::uint64_t seed);

/// Spring energy minimized by generate_pose, exposed for tests.
double embedding_energy(const chem::MolecularGraph& m, const Pose& pose, Pose* grad = nullptr);

/// Interaction score as a function of x = [translation (3), rotation
/// vector (3), torsion angles] applied to pose0: torsions rotate the side
/// of each acyclic rotatable bond away from the atom nearest the centroid,
/// then the body is rotated about the centroid of pose0 and translated.
/// x = 0 reproduces pose0. Holds references to its arguments.
class DockingObjective {
 public:
  DockingObjective(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                   Pose pose0, bool torsions, double cutoff = 8.0);

  Eigen::Index dim() const noexcept { return 6 + static_cast<Eigen::Index>(torsions_.size()); }
  int n_torsions() const noexcept { return static_cast<int>(torsions_.size()); }
  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad = nullptr) const;
  Pose place(const Eigen::VectorXd& x) const;

 private:
  struct Torsion {
    int fixed = 0;  // axis start, root side
    int pivot = 0;  // axis end, first moving atom
    std::vector<int> moving;
  };
  Pose body(const Eigen::VectorXd& x) const;

  const InteractionWeights* w_;
  const affinity::PocketGraph* pocket_;
  const chem::MolecularGraph* m_;
  Pose pose0_;
  Eigen::Vector3d pivot_;
  std::vector<Torsion> torsions_;
  double cutoff_;
};

struct DockResult {
  Pose pose;
  double score = 0.0;
  double initial_score = 0.0;
  int best_start = 0;
};

/// Local search over a rigid transform of pose0 about its centroid (plus
/// torsions of acyclic rotatable bonds unless cfg.rigid_only). Start 0 is
/// pose0 itself; the other starts apply seeded random rotations and small
/// shifts. Each start is a BFGS descent followed by cfg.mc_steps kicked
/// re-descents that are kept only when they lower the score. The returned
/// score is never above the score of pose0.
DockResult redock(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                  const Pose& pose0, const DockConfig& cfg = {}, std::uint64_t seed = 0);

/// generate_pose, centre the conformer at `center` (pocket centroid by
/// default), redock.
DockResult dock(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                std::uint64_t seed, const DockConfig& cfg = {}, std::optional<Eigen::Vector3d> center = std::nullopt);

/// Ground-truth label: generate_pose, centre the conformer at `center`
/// (pocket centroid by default), redock.
double surrogate_vina(const InteractionWeights& w, const affinity::PocketGraph& pocket,
                      const chem::MolecularGraph& m, std::uint64_t seed, const DockConfig& cfg = {},
                      std::optional<Eigen::Vector3d> center = std::nullopt);

/// Weights from {"version": 1, "w": [..4..]}; throws ValidationError.
InteractionWeights weights_from_json(const std::string& text);

}  // namespace sbdd::dock
