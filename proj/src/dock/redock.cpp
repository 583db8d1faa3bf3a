#include <cmath>

#include "sbdd/dock/bfgs.hpp"
#include "sbdd/dock/oracle.hpp"
#include "sbdd/error.hpp"
#include "sbdd/features.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::dock {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Eigen::Matrix3d exp_map(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

// Right Jacobian of the exponential map.
Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d k = skew(w);
  double a, b;
  if (theta < 1e-4) {
    a = 0.5 - theta * theta / 24.0;
    b = 1.0 / 6.0 - theta * theta / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / (theta * theta);
    b = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  return Eigen::Matrix3d::Identity() - a * k + b * k * k;
}

}  // namespace

DockingObjective::DockingObjective(const InteractionWeights& w, const affinity::PocketGraph& pocket,
                                   const chem::MolecularGraph& m, Pose pose0, bool torsions, double cutoff)
    : w_(&w), pocket_(&pocket), m_(&m), pose0_(std::move(pose0)), pivot_(centroid(pose0_)), cutoff_(cutoff) {
  if (pose0_.cols() != m.n_atoms() || !pose0_.allFinite()) throw ValidationError("docking: invalid initial pose");
  if (!torsions) return;
  const auto& topo = m.topology();
  const auto is_bridge = features::bridges(topo);
  int root = 0;
  (pose0_.colwise() - pivot_).colwise().squaredNorm().minCoeff(&root);
  for (std::size_t e = 0; e < topo.edges().size(); ++e) {
    const auto& b = topo.edges()[e];
    if (!is_bridge[e] || b.order != 1) continue;
    if (topo.neighbors(b.i).size() < 2 || topo.neighbors(b.j).size() < 2) continue;
    // side of b.j once the bond is cut
    std::vector<char> seen(static_cast<std::size_t>(m.n_atoms()), 0);
    std::vector<int> stack{b.j};
    seen[static_cast<std::size_t>(b.j)] = 1;
    std::vector<int> side;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      side.push_back(v);
      for (const auto& nb : topo.neighbors(v)) {
        if ((v == b.j && nb.node == b.i) || seen[static_cast<std::size_t>(nb.node)]) continue;
        seen[static_cast<std::size_t>(nb.node)] = 1;
        stack.push_back(nb.node);
      }
    }
    if (!seen[static_cast<std::size_t>(root)]) {
      torsions_.push_back({b.i, b.j, std::move(side)});
      continue;
    }
    std::vector<int> other;
    for (int v = 0; v < m.n_atoms(); ++v) {
      if (!seen[static_cast<std::size_t>(v)]) other.push_back(v);
    }
    torsions_.push_back({b.j, b.i, std::move(other)});
  }
}

Pose DockingObjective::body(const Eigen::VectorXd& x) const {
  Pose p = pose0_;
  for (std::size_t k = 0; k < torsions_.size(); ++k) {
    const auto& t = torsions_[k];
    const Eigen::Vector3d origin = p.col(t.pivot);
    const Eigen::Vector3d axis = (origin - p.col(t.fixed)).normalized();
    const Eigen::Matrix3d r = Eigen::AngleAxisd(x[6 + static_cast<Eigen::Index>(k)], axis).toRotationMatrix();
    for (int j : t.moving) p.col(j) = r * (p.col(j) - origin) + origin;
  }
  return p;
}

Pose DockingObjective::place(const Eigen::VectorXd& x) const {
  const Eigen::Matrix3d r = exp_map(x.segment<3>(3));
  return (r * (body(x).colwise() - pivot_)).colwise() + (pivot_ + x.head<3>());
}

double DockingObjective::operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
  if (x.size() != dim()) throw ValidationError("docking: parameter vector has the wrong size");
  const Eigen::Matrix3d r = exp_map(x.segment<3>(3));
  const Pose p = body(x);
  const Pose placed = (r * (p.colwise() - pivot_)).colwise() + (pivot_ + x.head<3>());
  if (!grad) return interaction_score(*w_, *pocket_, *m_, placed, nullptr, cutoff_);
  Pose g;
  const double e = interaction_score(*w_, *pocket_, *m_, placed, &g, cutoff_);
  grad->setZero(x.size());
  grad->head<3>() = g.rowwise().sum();
  const Pose gb = r.transpose() * g;
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  for (Eigen::Index j = 0; j < p.cols(); ++j) torque += (p.col(j) - pivot_).cross(gb.col(j));
  grad->segment<3>(3) = right_jacobian(x.segment<3>(3)).transpose() * torque;
  for (std::size_t k = 0; k < torsions_.size(); ++k) {
    const auto& t = torsions_[k];
    const Eigen::Vector3d origin = p.col(t.pivot);
    const Eigen::Vector3d axis = (origin - p.col(t.fixed)).normalized();
    Eigen::Vector3d tk = Eigen::Vector3d::Zero();
    for (int j : t.moving) tk += (p.col(j) - origin).cross(gb.col(j));
    (*grad)[6 + static_cast<Eigen::Index>(k)] = axis.dot(tk);
  }
  return e;
}

DockResult redock(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                  const Pose& pose0, const DockConfig& cfg, std::uint64_t seed) {
  if (pose0.cols() != m.n_atoms() || !pose0.allFinite()) throw ValidationError("redock: invalid initial pose");
  if (cfg.multistart < 1 || cfg.max_iters < 0 || cfg.mc_steps < 0) {
    throw ValidationError("redock: multistart must be >= 1 and iteration counts non-negative");
  }

  const DockingObjective model(w, pocket, m, pose0, !cfg.rigid_only, cfg.cutoff_angstrom);
  const Eigen::Index dim = model.dim();

  BfgsOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.grad_tol = cfg.grad_tol;
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) { return model(x, g); };

  DockResult best;
  best.initial_score = interaction_score(w, pocket, m, pose0, nullptr, cfg.cutoff_angstrom);
  best.pose = pose0;
  best.score = best.initial_score;
  Rng rng(seed);
  for (int s = 0; s < cfg.multistart; ++s) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
    if (s > 0) {
      Rng r = rng.split(static_cast<std::uint64_t>(s));
      const Eigen::AngleAxisd aa(rotation_from_uniforms(r.uniform(), r.uniform(), r.uniform()));
      x0.head<3>() = Eigen::Vector3d(r.normal(), r.normal(), r.normal());
      x0.segment<3>(3) = aa.angle() * aa.axis();
      for (Eigen::Index k = 6; k < dim; ++k) x0[k] = r.uniform(-std::numbers::pi, std::numbers::pi);
    }
    auto res = minimize_bfgs(f, x0, opt);
    // iterated local search: kick the local minimum, re-minimize, keep if lower
    Rng walk = rng.split(1000 + static_cast<std::uint64_t>(s));
    for (int k = 0; k < cfg.mc_steps; ++k) {
      Eigen::VectorXd y = res.x;
      y.head<3>() += cfg.mc_shift * Eigen::Vector3d(walk.normal(), walk.normal(), walk.normal());
      for (Eigen::Index d = 3; d < dim; ++d) y[d] += cfg.mc_turn * walk.normal();
      auto trial = minimize_bfgs(f, y, opt);
      if (trial.f < res.f) res = std::move(trial);
    }
    if (res.f < best.score) {
      best.score = res.f;
      best.pose = model.place(res.x);
      best.best_start = s;
    }
  }
  return best;
}

DockResult dock(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                std::uint64_t seed, const DockConfig& cfg, std::optional<Eigen::Vector3d> center) {
  Pose pose = generate_pose(m, seed);
  pose.colwise() += center.value_or(pocket.centroid());
  return redock(w, pocket, m, pose, cfg, mix64(seed ^ 0x7f4a7c159e3779b9ULL));
}

double surrogate_vina(const InteractionWeights& w, const affinity::PocketGraph& pocket, const chem::MolecularGraph& m,
                      std::uint64_t seed, const DockConfig& cfg, std::optional<Eigen::Vector3d> center) {
  return dock(w, pocket, m, seed, cfg, center).score;
}

}  // namespace sbdd::dock
