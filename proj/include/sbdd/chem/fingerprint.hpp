#pragma once

#include <bitset>

#include "sbdd/chem/molecule.hpp"

namespace sbdd::chem {

inline constexpr std::size_t kFingerprintBits = 2048;
inline constexpr int kFingerprintMaxPath = 7;

struct Fingerprint {
  std::bitset<kFingerprintBits> bits;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// Hashed multiset of every labelled simple path of 0..7 bonds. Each path
/// is written as alternating element symbols and bond orders, read in the
/// lexicographically smaller direction, so the result does not depend on
/// atom numbering. The k-th copy of a path key hashes to its own bit.
Fingerprint fingerprint(const MolecularGraph& m);

/// |a & b| / |a | b|; 1.0 when both are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace sbdd::chem
