#include "sbdd/features.hpp"

#include <algorithm>
#include <queue>

#include "sbdd/error.hpp"

namespace sbdd::features {

std::vector<bool> bridges(const chem::UnlabelledGraph& u) {
  // Iterative Tarjan low-link over edge indices so parallel paths through
  // the parent are handled by edge identity rather than node identity.
  const auto n = static_cast<std::size_t>(u.n_nodes());
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge index)
  for (int e = 0; e < u.n_edges(); ++e) {
    const auto& b = u.edges()[static_cast<std::size_t>(e)];
    adj[static_cast<std::size_t>(b.i)].emplace_back(b.j, e);
    adj[static_cast<std::size_t>(b.j)].emplace_back(b.i, e);
  }
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> is_bridge(static_cast<std::size_t>(u.n_edges()), false);
  int timer = 0;
  struct Frame {
    int node;
    int via_edge;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{static_cast<int>(root), -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto v = static_cast<std::size_t>(f.node);
      if (f.next < adj[v].size()) {
        const auto [w, e] = adj[v][f.next++];
        if (e == f.via_edge) continue;
        const auto wi = static_cast<std::size_t>(w);
        if (disc[wi] < 0) {
          disc[wi] = low[wi] = timer++;
          stack.push_back({w, e, 0});
        } else {
          low[v] = std::min(low[v], disc[wi]);
        }
      } else {
        const int via = f.via_edge;
        stack.pop_back();
        if (!stack.empty()) {
          const auto p = static_cast<std::size_t>(stack.back().node);
          low[p] = std::min(low[p], low[v]);
          if (low[v] > disc[p]) is_bridge[static_cast<std::size_t>(via)] = true;
        }
      }
    }
  }
  return is_bridge;
}

StructuralFeatures extract(const chem::UnlabelledGraph& u) {
  if (u.n_nodes() == 0) throw ValidationError("cannot extract features from an empty graph");
  if (!u.connected()) throw ValidationError("ligand graph is disconnected");

  StructuralFeatures f;
  f.n_nodes = u.n_nodes();
  f.n_rings = u.n_edges() - u.n_nodes() + 1;

  const auto bridge = bridges(u);
  for (int e = 0; e < u.n_edges(); ++e) {
    const auto& b = u.edges()[static_cast<std::size_t>(e)];
    if (b.order != 1 || !bridge[static_cast<std::size_t>(e)]) continue;
    if (u.neighbors(b.i).size() >= 2 && u.neighbors(b.j).size() >= 2) ++f.n_rotatable;
  }

  const auto n = static_cast<std::size_t>(u.n_nodes());
  std::vector<int> dist(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const chem::Neighbor& nb : u.neighbors(v)) {
        auto& d = dist[static_cast<std::size_t>(nb.node)];
        if (d < 0) {
          d = dist[static_cast<std::size_t>(v)] + 1;
          f.diameter = std::max(f.diameter, d);
          q.push(nb.node);
        }
      }
    }
  }
  return f;
}

FeatureStats fit_stats(std::span<const StructuralFeatures> corpus) {
  FeatureStats s;
  if (corpus.empty()) return s;
  const double n = static_cast<double>(corpus.size());
  for (const auto& f : corpus) s.mean += f.as_vector();
  s.mean /= n;
  Eigen::Vector4d var = Eigen::Vector4d::Zero();
  for (const auto& f : corpus) var += (f.as_vector() - s.mean).cwiseAbs2();
  s.std = (var / n).cwiseSqrt();
  for (int k = 0; k < 4; ++k) {
    if (s.std[k] == 0.0) s.std[k] = 1.0;
  }
  return s;
}

}  // namespace sbdd::features
