#pragma once

#include <array>
#include <vector>

#include "sbdd/chem/molecule.hpp"
#include "sbdd/rng.hpp"

namespace sbdd::design {

inline constexpr int kMaxDegree = 6;

/// Per order-weighted degree d = 0..6, a categorical distribution over
/// chem::kElements restricted to elements with max valence >= d.
class AtomTable {
 public:
  using Row = std::array<double, chem::kElements.size()>;

  /// Normalized row for degree d. Degrees never observed fall back to the
  /// uniform distribution over valence-legal elements (logged once per
  /// table and degree). Throws ValidationError for d outside 0..6.
  const Row& distribution(int d) const;

  bool observed(int d) const { return observed_.at(static_cast<std::size_t>(d)); }

  /// Sets row d from unnormalized weights; illegal elements are zeroed.
  /// Throws ValidationError when no legal mass remains.
  void set_row(int d, const Row& weights);

 private:
  std::array<Row, kMaxDegree + 1> rows_{};
  std::array<bool, kMaxDegree + 1> observed_{};
  mutable std::array<bool, kMaxDegree + 1> warned_{};
};

/// Element frequencies per degree over a corpus. Throws ValidationError on
/// an empty corpus.
AtomTable build_atom_table(const std::vector<chem::MolecularGraph>& corpus);

/// Draws an element for every node independently given its degree.
/// Throws ValidationError for degrees above 6.
chem::MolecularGraph sample_atoms(const chem::UnlabelledGraph& u, const AtomTable& t, Rng& rng);

/// Node permutations p with p(u) == u (up to `cap` of them; the identity
/// comes first). `complete` is false when the cap was hit.
struct Automorphisms {
  std::vector<std::vector<int>> maps;
  bool complete = true;
};
Automorphisms automorphisms(const chem::UnlabelledGraph& u, std::size_t cap = 20000);

struct Enumeration {
  std::vector<chem::MolecularGraph> molecules;
  int draws = 0;
  bool stopped_early = false;  // 10 consecutive duplicate draws
};

/// Up to k labellings of u that are pairwise distinct molecules, i.e. not
/// related by an automorphism of u. Stops after 10 duplicates in a row.
Enumeration enumerate_unique(const chem::UnlabelledGraph& u, const AtomTable& t, int k, Rng& rng);

}  // namespace sbdd::design
