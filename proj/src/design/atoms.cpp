#include "sbdd/design/atoms.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "sbdd/error.hpp"

namespace sbdd::design {

using chem::Element;
using chem::kElements;

namespace {

constexpr int kDuplicateStop = 10;

bool legal(std::size_t e, int d) { return chem::max_valence(kElements[e]) >= d; }

void check_degree(int d) {
  if (d < 0 || d > kMaxDegree) throw ValidationError("degree " + std::to_string(d) + " has no legal element");
}

}  // namespace

const AtomTable::Row& AtomTable::distribution(int d) const {
  check_degree(d);
  const auto i = static_cast<std::size_t>(d);
  if (!observed_[i] && !warned_[i]) {
    warned_[i] = true;
    spdlog::warn("atom table has no corpus atoms of degree {}; using uniform legal elements", d);
  }
  if (!observed_[i]) {
    static const auto fallback = [] {
      std::array<Row, kMaxDegree + 1> rows{};
      for (int dd = 0; dd <= kMaxDegree; ++dd) {
        double n = 0;
        for (std::size_t e = 0; e < kElements.size(); ++e) n += legal(e, dd);
        for (std::size_t e = 0; e < kElements.size(); ++e) rows[static_cast<std::size_t>(dd)][e] = legal(e, dd) / n;
      }
      return rows;
    }();
    return fallback[i];
  }
  return rows_[i];
}

void AtomTable::set_row(int d, const Row& weights) {
  check_degree(d);
  Row r{};
  double total = 0.0;
  for (std::size_t e = 0; e < kElements.size(); ++e) {
    if (weights[e] < 0.0) throw ValidationError("atom table weights must be non-negative");
    r[e] = legal(e, d) ? weights[e] : 0.0;
    total += r[e];
  }
  if (total <= 0.0) throw ValidationError("atom table row has no legal mass");
  for (double& x : r) x /= total;
  rows_[static_cast<std::size_t>(d)] = r;
  observed_[static_cast<std::size_t>(d)] = true;
}

AtomTable build_atom_table(const std::vector<chem::MolecularGraph>& corpus) {
  if (corpus.empty()) throw ValidationError("build_atom_table: empty corpus");
  std::array<AtomTable::Row, kMaxDegree + 1> counts{};
  for (const auto& m : corpus) {
    for (int i = 0; i < m.n_atoms(); ++i) {
      const int d = chem::node_degree(m.topology(), i);
      if (d > kMaxDegree) continue;
      counts[static_cast<std::size_t>(d)][static_cast<std::size_t>(m.atom(i))] += 1.0;
    }
  }
  AtomTable t;
  for (int d = 0; d <= kMaxDegree; ++d) {
    double legal_mass = 0.0;
    for (std::size_t e = 0; e < kElements.size(); ++e) legal_mass += legal(e, d) ? counts[static_cast<std::size_t>(d)][e] : 0.0;
    if (legal_mass > 0.0) t.set_row(d, counts[static_cast<std::size_t>(d)]);
  }
  return t;
}

chem::MolecularGraph sample_atoms(const chem::UnlabelledGraph& u, const AtomTable& t, Rng& rng) {
  std::vector<Element> atoms;
  atoms.reserve(static_cast<std::size_t>(u.n_nodes()));
  for (int i = 0; i < u.n_nodes(); ++i) {
    const auto& row = t.distribution(chem::node_degree(u, i));
    atoms.push_back(kElements[rng.categorical(row)]);
  }
  return chem::label(u, std::move(atoms));
}

Automorphisms automorphisms(const chem::UnlabelledGraph& u, std::size_t cap) {
  const int n = u.n_nodes();
  // colour refinement on (degree, neighbour colours, bond orders) prunes
  // the candidate images of each node
  std::vector<long> color(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) color[static_cast<std::size_t>(i)] = chem::node_degree(u, i) * 8 + static_cast<long>(u.neighbors(i).size());
  for (int round = 0; round < n; ++round) {
    std::vector<std::vector<long>> sig(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& s = sig[static_cast<std::size_t>(i)];
      for (const auto& nb : u.neighbors(i)) s.push_back(color[static_cast<std::size_t>(nb.node)] * 4 + nb.order);
      std::sort(s.begin(), s.end());
      s.insert(s.begin(), color[static_cast<std::size_t>(i)]);
    }
    std::vector<std::vector<long>> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<long> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      next[static_cast<std::size_t>(i)] =
          std::lower_bound(distinct.begin(), distinct.end(), sig[static_cast<std::size_t>(i)]) - distinct.begin();
    }
    const bool stable = std::set<long>(next.begin(), next.end()).size() == std::set<long>(color.begin(), color.end()).size();
    color = std::move(next);
    if (stable) break;
  }

  // BFS order so each node after the first has a mapped neighbour
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    seen[static_cast<std::size_t>(s)] = 1;
    order.push_back(s);
    for (std::size_t k = order.size() - 1; k < order.size(); ++k) {
      for (const auto& nb : u.neighbors(order[k])) {
        if (!seen[static_cast<std::size_t>(nb.node)]) {
          seen[static_cast<std::size_t>(nb.node)] = 1;
          order.push_back(nb.node);
        }
      }
    }
  }
  auto bond_order = [&](int a, int b) {
    for (const auto& nb : u.neighbors(a)) {
      if (nb.node == b) return nb.order;
    }
    return 0;
  };

  Automorphisms out;
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  // identity first
  std::vector<int> identity(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) identity[static_cast<std::size_t>(i)] = i;
  out.maps.push_back(identity);

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (!out.complete) return;
    if (depth == order.size()) {
      if (map != identity) {
        if (out.maps.size() >= cap) {
          out.complete = false;
          return;
        }
        out.maps.push_back(map);
      }
      return;
    }
    const int v = order[depth];
    for (int img = 0; img < n; ++img) {
      if (used[static_cast<std::size_t>(img)] || color[static_cast<std::size_t>(img)] != color[static_cast<std::size_t>(v)]) continue;
      bool ok = true;
      for (const auto& nb : u.neighbors(v)) {
        const int mapped = map[static_cast<std::size_t>(nb.node)];
        if (mapped >= 0 && bond_order(img, mapped) != nb.order) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(v)] = img;
      used[static_cast<std::size_t>(img)] = 1;
      self(self, depth + 1);
      map[static_cast<std::size_t>(v)] = -1;
      used[static_cast<std::size_t>(img)] = 0;
      if (!out.complete) return;
    }
  };
  recurse(recurse, 0);
  return out;
}

Enumeration enumerate_unique(const chem::UnlabelledGraph& u, const AtomTable& t, int k, Rng& rng) {
  if (k < 1) throw ValidationError("enumerate_unique: k must be >= 1");
  const auto aut = automorphisms(u);
  if (!aut.complete) spdlog::warn("enumerate_unique: automorphism group truncated; duplicates may survive");
  Enumeration out;
  std::set<std::vector<std::uint8_t>> seen;
  int streak = 0;
  while (static_cast<int>(out.molecules.size()) < k) {
    auto m = sample_atoms(u, t, rng);
    ++out.draws;
    // canonical key: lexicographic minimum of the label vector over Aut(u)
    std::vector<std::uint8_t> key;
    for (const auto& p : aut.maps) {
      std::vector<std::uint8_t> cand(static_cast<std::size_t>(u.n_nodes()));
      for (int i = 0; i < u.n_nodes(); ++i) cand[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = static_cast<std::uint8_t>(m.atom(i));
      if (key.empty() || cand < key) key = std::move(cand);
    }
    if (!seen.insert(std::move(key)).second) {
      if (++streak >= kDuplicateStop) {
        out.stopped_early = true;
        break;
      }
      continue;
    }
    streak = 0;
    out.molecules.push_back(std::move(m));
  }
  return out;
}

}  // namespace sbdd::design
