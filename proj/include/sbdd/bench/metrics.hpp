#pragma once

#include <span>
#include <vector>

#include "sbdd/chem/fingerprint.hpp"
#include "sbdd/chem/molecule.hpp"

namespace sbdd::bench {

/// Share of generated scores <= reference (lower is better, ties count).
/// Throws ValidationError on an empty list.
double metric_high_affinity(std::span<const double> generated, double reference);

/// Mean over unordered pairs of 1 - tanimoto. Needs two or more molecules.
double metric_diversity(std::span<const chem::Fingerprint> mols);
double metric_diversity(std::span<const chem::MolecularGraph> mols);

/// Mean over molecules of 1 - (max tanimoto against the training set).
/// Needs at least one molecule and a nonempty training set.
double metric_novelty(std::span<const chem::Fingerprint> mols, std::span<const chem::Fingerprint> train);
double metric_novelty(std::span<const chem::MolecularGraph> mols, std::span<const chem::MolecularGraph> train);

std::vector<chem::Fingerprint> fingerprints(std::span<const chem::MolecularGraph> mols);

double mean(std::span<const double> x);

/// 1 - SS_res / SS_tot of predictions against targets.
double r_squared(std::span<const double> y, std::span<const double> yhat);

/// Squared Pearson correlation.
double squared_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace sbdd::bench
