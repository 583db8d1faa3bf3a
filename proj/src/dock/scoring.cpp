#include <cmath>

#include "json.hpp"
#include "sbdd/dock/oracle.hpp"
#include "sbdd/error.hpp"

namespace sbdd::dock {

using chem::Element;

Pose apply(const RigidTransform& t, const Pose& pose, const Eigen::Vector3d& pivot) {
  const Eigen::Matrix3d r = t.rotation.normalized().toRotationMatrix();
  return ((r * (pose.colwise() - pivot)).colwise() + (pivot + t.translation));
}

double element_radius(Element e) noexcept {
  switch (e) {
    case Element::C: return 1.9;
    case Element::N: return 1.8;
    case Element::O: return 1.7;
    case Element::S: return 2.0;
    case Element::P: return 2.1;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I: return 1.8;
  }
  return 1.9;
}

bool hydrophobic_residue(int type) noexcept {
  // ALA ILE LEU MET PHE VAL
  return type == 0 || type == 9 || type == 10 || type == 12 || type == 13 || type == 19;
}

KernelTerms kernels(double d, bool hydrophobic_pair) noexcept {
  KernelTerms k;
  const double a = d / 0.5;
  k.value[0] = std::exp(-a * a);
  k.slope[0] = -2.0 * a / 0.5 * k.value[0];
  const double b = (d - 3.0) / 2.0;
  k.value[1] = std::exp(-b * b);
  k.slope[1] = -2.0 * b / 2.0 * k.value[1];
  if (d < 0.0) {
    k.value[2] = d * d;
    k.slope[2] = 2.0 * d;
  }
  if (hydrophobic_pair) {
    if (d <= 0.5) {
      k.value[3] = 1.0;
    } else if (d < 1.5) {
      const double s = d - 0.5;
      k.value[3] = 1.0 - s * s * (3.0 - 2.0 * s);
      k.slope[3] = -6.0 * s * (1.0 - s);
    }
  }
  return k;
}

double taper(double d, double cutoff, double* slope) noexcept {
  if (slope) *slope = 0.0;
  if (d >= cutoff) return 0.0;
  const double s = d - (cutoff - 1.0);
  if (s <= 0.0) return 1.0;
  if (slope) *slope = -6.0 * s * (1.0 - s);
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double interaction_score(const InteractionWeights& w, const affinity::PocketGraph& pocket,
                         const chem::MolecularGraph& m, const Pose& pose, Pose* grad, double cutoff) {
  if (pose.cols() != m.n_atoms()) throw ValidationError("pose does not match the molecule's atom count");
  if (grad) *grad = Pose::Zero(3, pose.cols());
  const double cutoff2 = cutoff * cutoff;
  double total = 0.0;
  for (const auto& res : pocket.residues) {
    const bool hydrophobic = hydrophobic_residue(res.type);
    for (int j = 0; j < m.n_atoms(); ++j) {
      const Eigen::Vector3d diff = pose.col(j) - res.center;
      const double d2 = diff.squaredNorm();
      if (d2 >= cutoff2) continue;
      const double d = std::sqrt(d2);
      const Element e = m.atom(j);
      const KernelTerms k = kernels(d - kResidueRadius - element_radius(e), hydrophobic && e == Element::C);
      double raw = 0.0, raw_slope = 0.0;
      for (int q = 0; q < 4; ++q) {
        raw += w.w[static_cast<std::size_t>(q)] * k.value[static_cast<std::size_t>(q)];
        raw_slope += w.w[static_cast<std::size_t>(q)] * k.slope[static_cast<std::size_t>(q)];
      }
      double t_slope = 0.0;
      const double t = taper(d, cutoff, &t_slope);
      total += raw * t;
      if (grad && d > 0.0) grad->col(j) += (raw_slope * t + raw * t_slope) / d * diff;
    }
  }
  return total;
}

InteractionWeights weights_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("weights file: ") + e.what());
  }
  if (j.value("version", 0) != kWeightsVersion) throw ValidationError("weights file: unsupported version");
  const auto& arr = j.at("w");
  if (!arr.is_array() || arr.size() != 4) throw ValidationError("weights file: 'w' must hold 4 numbers");
  InteractionWeights w;
  for (std::size_t i = 0; i < 4; ++i) {
    w.w[i] = arr[i].get<double>();
    if (!std::isfinite(w.w[i])) throw ValidationError("weights file: non-finite weight");
  }
  return w;
}

}  // namespace sbdd::dock
