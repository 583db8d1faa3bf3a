#include "sbdd/chem/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "sbdd/error.hpp"

namespace sbdd::chem {

namespace {

struct OpenRing {
  int atom = -1;
  int order = 0;  // 0: unspecified at the opening side
  std::size_t offset = 0;
};

int bond_order(char c) {
  switch (c) {
    case '-': return 1;
    case '=': return 2;
    case '#': return 3;
    default: return 0;
  }
}

}  // namespace

MolecularGraph parse_smiles(std::string_view s) {
  std::vector<Element> atoms;
  std::vector<Bond> bonds;
  std::vector<int> branch_stack;
  std::vector<std::size_t> branch_offsets;
  std::array<std::optional<OpenRing>, 10> rings{};

  int previous = -1;
  int pending_order = 0;
  std::size_t pending_offset = 0;

  auto add_bond = [&](int a, int b, int order, std::size_t offset) {
    for (const Bond& bd : bonds) {
      if ((bd.i == a && bd.j == b) || (bd.i == b && bd.j == a)) {
        throw ParseError("duplicate bond between atoms " + std::to_string(a) + " and " + std::to_string(b), offset);
      }
    }
    bonds.push_back({a, b, order});
  };

  if (s.empty()) throw ParseError("empty SMILES", 0);

  std::size_t pos = 0;
  while (pos < s.size()) {
    const char c = s[pos];
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t len = 1;
      if (pos + 1 < s.size() && ((c == 'C' && s[pos + 1] == 'l') || (c == 'B' && s[pos + 1] == 'r'))) len = 2;
      const auto element = element_from_symbol(s.substr(pos, len));
      if (!element) throw ParseError("unknown atom symbol '" + std::string(s.substr(pos, len)) + "'", pos);
      const int index = static_cast<int>(atoms.size());
      atoms.push_back(*element);
      if (previous >= 0) {
        add_bond(previous, index, pending_order == 0 ? 1 : pending_order, pos);
      } else if (pending_order != 0) {
        throw ParseError("bond symbol without a preceding atom", pending_offset);
      }
      pending_order = 0;
      previous = index;
      pos += len;
    } else if (bond_order(c) != 0) {
      if (previous < 0 || pending_order != 0) throw ParseError("bond symbol at invalid position", pos);
      pending_order = bond_order(c);
      pending_offset = pos;
      ++pos;
    } else if (c >= '1' && c <= '9') {
      if (previous < 0) throw ParseError("ring-closure digit without a preceding atom", pos);
      auto& slot = rings[static_cast<std::size_t>(c - '0')];
      if (!slot) {
        slot = OpenRing{previous, pending_order, pos};
      } else {
        if (slot->atom == previous) throw ParseError("ring closure onto the same atom", pos);
        if (slot->order != 0 && pending_order != 0 && slot->order != pending_order) {
          throw ParseError("conflicting bond orders on ring closure " + std::string(1, c), pos);
        }
        const int order = std::max({slot->order, pending_order, 1});
        add_bond(slot->atom, previous, order, pos);
        slot.reset();
      }
      pending_order = 0;
      ++pos;
    } else if (c == '(') {
      if (previous < 0) throw ParseError("branch without a preceding atom", pos);
      if (pending_order != 0) throw ParseError("bond symbol at invalid position", pending_offset);
      branch_stack.push_back(previous);
      branch_offsets.push_back(pos);
      ++pos;
    } else if (c == ')') {
      if (branch_stack.empty()) throw ParseError("unbalanced parenthesis", pos);
      if (pending_order != 0) throw ParseError("bond symbol at invalid position", pending_offset);
      if (pos > 0 && s[pos - 1] == '(') throw ParseError("empty branch", pos);
      previous = branch_stack.back();
      branch_stack.pop_back();
      branch_offsets.pop_back();
      ++pos;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      throw ParseError("aromatic atom '" + std::string(1, c) + "' is not supported; use a Kekule form", pos);
    } else {
      throw ParseError("unsupported symbol '" + std::string(1, c) + "'", pos);
    }
  }

  if (pending_order != 0) throw ParseError("bond symbol at invalid position", pending_offset);
  if (!branch_stack.empty()) throw ParseError("unbalanced parenthesis", branch_offsets.back());
  for (std::size_t d = 1; d < rings.size(); ++d) {
    if (rings[d]) throw ParseError("unclosed ring digit " + std::to_string(d), rings[d]->offset);
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

namespace {

char bond_char(int order) { return order == 2 ? '=' : order == 3 ? '#' : '\0'; }

struct Writer {
  struct Pending {
    int target;
    int digit;
  };

  const MolecularGraph& m;
  std::vector<int> parent;
  std::vector<std::vector<Neighbor>> children;
  std::vector<std::vector<Neighbor>> ring_openings;  // non-tree edges, stored at the earlier atom
  std::vector<int> visit_rank;
  std::array<bool, 10> digit_used{};
  std::vector<Pending> pending_close;
  std::string out;

  explicit Writer(const MolecularGraph& mol)
      : m(mol),
        parent(static_cast<std::size_t>(mol.n_atoms()), -1),
        children(static_cast<std::size_t>(mol.n_atoms())),
        ring_openings(static_cast<std::size_t>(mol.n_atoms())),
        visit_rank(static_cast<std::size_t>(mol.n_atoms()), -1) {}

  void build_tree() {
    int counter = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    visit_rank[0] = counter++;
    while (!stack.empty()) {
      auto& [atom, next] = stack.back();
      const auto& nbs = m.topology().neighbors(atom);
      if (next == nbs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = nbs[next++];
      const auto a = static_cast<std::size_t>(atom);
      const auto b = static_cast<std::size_t>(nb.node);
      if (visit_rank[b] < 0) {
        visit_rank[b] = counter++;
        parent[b] = atom;
        children[a].push_back(nb);
        stack.emplace_back(nb.node, 0);
      } else if (nb.node != parent[a] && visit_rank[b] < visit_rank[a]) {
        ring_openings[b].push_back({atom, nb.order});
      }
    }
  }

  int take_digit() {
    for (std::size_t d = 1; d <= 9; ++d) {
      if (!digit_used[d]) {
        digit_used[d] = true;
        return static_cast<int>(d);
      }
    }
    throw ValidationError("more than nine simultaneously open ring closures");
  }

  void emit(int atom) {
    const auto a = static_cast<std::size_t>(atom);
    out += symbol(m.atom(atom));
    for (auto it = pending_close.begin(); it != pending_close.end();) {
      if (it->target == atom) {
        out += static_cast<char>('0' + it->digit);
        digit_used[static_cast<std::size_t>(it->digit)] = false;
        it = pending_close.erase(it);
      } else {
        ++it;
      }
    }
    for (const Neighbor& partner : ring_openings[a]) {
      const int d = take_digit();
      if (const char bc = bond_char(partner.order)) out += bc;
      out += static_cast<char>('0' + d);
      pending_close.push_back({partner.node, d});
    }
    const auto& kids = children[a];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out += '(';
      if (const char bc = bond_char(kids[k].order)) out += bc;
      emit(kids[k].node);
      if (branch) out += ')';
    }
  }
};

}  // namespace

std::string write_smiles(const MolecularGraph& m) {
  if (m.n_atoms() == 0) throw ValidationError("cannot write an empty molecule");
  if (!m.topology().connected()) throw ValidationError("cannot write a disconnected molecule");
  Writer w(m);
  w.build_tree();
  w.emit(0);
  return w.out;
}

}  // namespace sbdd::chem
