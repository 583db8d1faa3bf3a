#include "sbdd/chem/fingerprint.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sbdd/rng.hpp"

namespace sbdd::chem {

namespace {

// Tokens alternate element symbols and bond orders: C 1 C 2 O ...
std::string encode(const std::vector<std::string_view>& tokens) {
  std::string s;
  for (std::string_view t : tokens) {
    s += t;
    s += '|';
  }
  return s;
}

struct PathWalker {
  const MolecularGraph& m;
  std::map<std::string, int> counts;
  std::vector<char> on_path;
  std::vector<std::string_view> tokens;
  int start = 0;

  void record(int end) {
    // every path of one or more bonds is reached from both ends; count it once
    if (end < start) return;
    std::vector<std::string_view> reversed(tokens.rbegin(), tokens.rend());
    std::string fwd = encode(tokens);
    std::string bwd = encode(reversed);
    ++counts[std::min(std::move(fwd), std::move(bwd))];
  }

  void walk(int atom, int depth) {
    record(atom);
    if (depth == kFingerprintMaxPath) return;
    for (const Neighbor& nb : m.topology().neighbors(atom)) {
      const auto b = static_cast<std::size_t>(nb.node);
      if (on_path[b]) continue;
      on_path[b] = 1;
      tokens.push_back(nb.order == 1 ? "1" : nb.order == 2 ? "2" : "3");
      tokens.push_back(symbol(m.atom(nb.node)));
      walk(nb.node, depth + 1);
      tokens.pop_back();
      tokens.pop_back();
      on_path[b] = 0;
    }
  }
};

}  // namespace

Fingerprint fingerprint(const MolecularGraph& m) {
  PathWalker walker{m, {}, std::vector<char>(static_cast<std::size_t>(m.n_atoms()), 0), {}, 0};
  for (int start = 0; start < m.n_atoms(); ++start) {
    walker.start = start;
    walker.on_path[static_cast<std::size_t>(start)] = 1;
    walker.tokens = {symbol(m.atom(start))};
    walker.walk(start, 0);
    walker.on_path[static_cast<std::size_t>(start)] = 0;
  }
  // The k-th occurrence of a path sets its own bit, so multiplicities count.
  Fingerprint fp;
  for (const auto& [key, count] : walker.counts) {
    for (int k = 1; k <= count; ++k) fp.bits.set(stable_hash(key + std::to_string(k)) % kFingerprintBits);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  const std::size_t both = (a.bits & b.bits).count();
  const std::size_t either = (a.bits | b.bits).count();
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace sbdd::chem
