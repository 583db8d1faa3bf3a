#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace sbdd {

/// 3 x n column-per-point coordinate block, Angstrom.
using Coords = Eigen::Matrix3Xd;

inline Eigen::Vector3d centroid(const Coords& x) {
  if (x.cols() == 0) return Eigen::Vector3d::Zero();
  return x.rowwise().mean();
}

/// Uniformly distributed rotation from three uniforms in [0, 1) (Shoemake).
inline Eigen::Quaterniond rotation_from_uniforms(double u1, double u2, double u3) {
  constexpr double two_pi = 6.283185307179586;
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Eigen::Quaterniond(a * std::sin(two_pi * u2), a * std::cos(two_pi * u2), b * std::sin(two_pi * u3),
                            b * std::cos(two_pi * u3))
      .normalized();
}

/// Root-mean-square deviation after optimal superposition (Kabsch).
inline double best_fit_rmsd(const Coords& a, const Coords& b) {
  const Eigen::Index n = a.cols();
  if (n == 0) return 0.0;
  const Coords pa = a.colwise() - centroid(a);
  const Coords pb = b.colwise() - centroid(b);
  const Eigen::Matrix3d h = pa * pb.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0) d(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
  return std::sqrt((r * pa - pb).colwise().squaredNorm().sum() / static_cast<double>(n));
}

}  // namespace sbdd
