#pragma once

#include <span>

#include <Eigen/Dense>

#include "sbdd/chem/molecule.hpp"

namespace sbdd::features {

/// The four topology descriptors the affinity head sees for a ligand.
struct StructuralFeatures {
  int n_nodes = 0;
  int n_rings = 0;      // cyclomatic number
  int n_rotatable = 0;  // acyclic single bonds between non-terminal atoms
  int diameter = 0;     // hops

  Eigen::Vector4d as_vector() const {
    return {static_cast<double>(n_nodes), static_cast<double>(n_rings), static_cast<double>(n_rotatable),
            static_cast<double>(diameter)};
  }

  friend bool operator==(const StructuralFeatures&, const StructuralFeatures&) = default;
};

struct FeatureStats {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Vector4d std = Eigen::Vector4d::Ones();
};

/// Throws ValidationError for disconnected or empty graphs.
StructuralFeatures extract(const chem::UnlabelledGraph& u);

/// Edge mask: true for edges whose removal disconnects their component.
std::vector<bool> bridges(const chem::UnlabelledGraph& u);

/// Mean and population standard deviation; zero deviations become 1.
FeatureStats fit_stats(std::span<const StructuralFeatures> corpus);

inline Eigen::Vector4d standardize(const StructuralFeatures& f, const FeatureStats& s) {
  return (f.as_vector() - s.mean).cwiseQuotient(s.std);
}

}  // namespace sbdd::features
