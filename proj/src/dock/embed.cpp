#include <cmath>
#include <deque>
#include <string>

#include <spdlog/spdlog.h>

#include "sbdd/dock/bfgs.hpp"
#include "sbdd/dock/oracle.hpp"
#include "sbdd/error.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::dock {

namespace {

constexpr double kBondLength = 1.5;
constexpr double kContact = 1.8;
constexpr double kForceTol = 1e-3;
constexpr int kMaxEmbedIters = 5000;
constexpr int kAttempts = 8;

Pose layered_start(const chem::MolecularGraph& m, Rng& rng) {
  const int n = m.n_atoms();
  std::vector<int> depth(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> layers;
  std::deque<int> queue{0};
  depth[0] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    const auto d = static_cast<std::size_t>(depth[static_cast<std::size_t>(v)]);
    if (layers.size() <= d) layers.resize(d + 1);
    layers[d].push_back(v);
    for (const auto& nb : m.topology().neighbors(v)) {
      if (depth[static_cast<std::size_t>(nb.node)] < 0) {
        depth[static_cast<std::size_t>(nb.node)] = static_cast<int>(d) + 1;
        queue.push_back(nb.node);
      }
    }
  }
  Pose x(3, n);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto count = static_cast<double>(layers[k].size());
    const double radius = count > 1 ? 0.8 * count : 0.0;
    for (std::size_t i = 0; i < layers[k].size(); ++i) {
      const double angle = phase + 2.0 * std::numbers::pi * static_cast<double>(i) / count;
      x.col(layers[k][i]) << kBondLength * static_cast<double>(k) + rng.normal(0.0, 0.3),
          radius * std::cos(angle) + rng.normal(0.0, 0.5), radius * std::sin(angle) + rng.normal(0.0, 0.5);
    }
  }
  return x;
}

double max_force(const Pose& grad) { return grad.cols() ? grad.colwise().norm().maxCoeff() : 0.0; }

}  // namespace

double embedding_energy(const chem::MolecularGraph& m, const Pose& pose, Pose* grad) {
  const int n = m.n_atoms();
  if (grad) *grad = Pose::Zero(3, n);
  Eigen::MatrixXi bonded = Eigen::MatrixXi::Zero(n, n);
  double e = 0.0;
  for (const auto& b : m.bonds()) {
    bonded(b.i, b.j) = bonded(b.j, b.i) = 1;
    const Eigen::Vector3d diff = pose.col(b.i) - pose.col(b.j);
    const double d = diff.norm();
    e += (d - kBondLength) * (d - kBondLength);
    if (grad && d > 0.0) {
      const Eigen::Vector3d f = 2.0 * (d - kBondLength) / d * diff;
      grad->col(b.i) += f;
      grad->col(b.j) -= f;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (bonded(i, j)) continue;
      const Eigen::Vector3d diff = pose.col(i) - pose.col(j);
      const double d = diff.norm();
      if (d >= kContact) continue;
      e += (kContact - d) * (kContact - d);
      if (grad && d > 0.0) {
        const Eigen::Vector3d f = -2.0 * (kContact - d) / d * diff;
        grad->col(i) += f;
        grad->col(j) -= f;
      }
    }
  }
  return e;
}

Pose generate_pose(const chem::MolecularGraph& m, std::uint64_t seed) {
  if (m.n_atoms() == 0 || !m.topology().connected()) throw ValidationError("generate_pose: molecule must be connected");
  const int n = m.n_atoms();
  if (n == 1) return Pose::Zero(3, 1);

  const Objective energy = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
    const Eigen::Map<const Pose> x(v.data(), 3, n);
    if (!g) return embedding_energy(m, x);
    Pose gp;
    const double e = embedding_energy(m, x, &gp);
    *g = Eigen::Map<const Eigen::VectorXd>(gp.data(), gp.size());
    return e;
  };
  BfgsOptions opt;
  opt.max_iters = kMaxEmbedIters;
  opt.grad_tol = kForceTol / std::sqrt(3.0);
  opt.max_step = 1.0;

  Rng base(seed);
  double residual = 0.0;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng = base.split(static_cast<std::uint64_t>(attempt));
    const Pose start = layered_start(m, rng);
    const auto res = minimize_bfgs(energy, Eigen::Map<const Eigen::VectorXd>(start.data(), start.size()), opt);
    Pose x = Eigen::Map<const Pose>(res.x.data(), 3, n);
    Pose g;
    embedding_energy(m, x, &g);
    residual = max_force(g);
    if (residual >= kForceTol) continue;
    double closest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) closest = std::min(closest, (x.col(i) - x.col(j)).norm());
    }
    if (closest < 0.5) continue;
    x.colwise() -= centroid(x);
    return x;
  }
  throw NumericError("generate_pose: no converged embedding after " + std::to_string(kAttempts) +
                     " attempts of up to " + std::to_string(kMaxEmbedIters) + " iterations (max force " +
                     std::to_string(residual) + ")");
}

}  // namespace sbdd::dock
