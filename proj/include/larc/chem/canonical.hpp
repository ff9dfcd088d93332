// Canonical SMILES output. Atom ranks come from iterative invariant
// refinement; remaining ties are resolved by individualizing each tied atom
// in turn and keeping the lexicographically smallest emitted string, so the
// result is invariant under any input atom ordering.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "larc/chem/hash.hpp"
#include "larc/chem/molecule.hpp"
#include "larc/chem/smiles.hpp"

namespace larc::chem {

namespace detail {

inline std::vector<std::uint64_t> initial_colors(const MoleculeGraph& g) {
  std::vector<std::uint64_t> colors(g.atom_count());
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom& a = g.atom(i);
    colors[i] = hash_atom_invariant(a.element, g.degree(i), a.charge,
                                    a.hydrogens, a.aromatic, a.in_ring);
  }
  return colors;
}

inline std::size_t distinct_count(std::vector<std::uint64_t> colors) {
  std::sort(colors.begin(), colors.end());
  return static_cast<std::size_t>(
      std::unique(colors.begin(), colors.end()) - colors.begin());
}

inline void refine_colors(const MoleculeGraph& g,
                          std::vector<std::uint64_t>& colors) {
  std::size_t prev = distinct_count(colors);
  std::vector<std::uint64_t> next(colors.size());
  for (;;) {
    for (int i = 0; i < g.atom_count(); ++i) {
      std::vector<std::pair<std::uint8_t, std::uint64_t>> pairs;
      pairs.reserve(g.incident(i).size());
      for (int b : g.incident(i)) {
        pairs.emplace_back(static_cast<std::uint8_t>(g.bond(b).order),
                           colors[g.other_end(b, i)]);
      }
      std::sort(pairs.begin(), pairs.end());
      next[i] = hash_neighborhood(colors[i], pairs);
    }
    colors = next;
    const std::size_t cur = distinct_count(colors);
    if (cur == prev) return;
    prev = cur;
  }
}

// Emits a SMILES string for a discretely colored graph: traversal starts at
// the minimum-color atom and neighbors are visited in ascending color order.
class CanonicalWriter {
public:
  CanonicalWriter(const MoleculeGraph& g, const std::vector<std::uint64_t>& colors)
      : g_(g), colors_(colors) {}

  std::string write() {
    const int n = g_.atom_count();
    visited_.assign(n, false);
    children_.assign(n, {});
    ring_events_.assign(n, {});
    ring_count_ = 0;
    int start = 0;
    for (int i = 1; i < n; ++i)
      if (colors_[i] < colors_[start]) start = i;
    scan(start, -1);
    std::string out;
    emit(start, out);
    return out;
  }

private:
  void scan(int u, int parent_bond) {
    visited_[u] = true;
    std::vector<std::pair<std::uint64_t, int>> order;
    for (int b : g_.incident(u)) {
      if (b == parent_bond) continue;
      order.emplace_back(colors_[g_.other_end(b, u)], b);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [color, b] : order) {
      const int v = g_.other_end(b, u);
      if (!visited_[v]) {
        children_[u].emplace_back(b, v);
        scan(v, b);
      } else if (!ring_bond_seen_.count(b)) {
        ring_bond_seen_.insert(b);
        const int num = ++ring_count_;
        if (num > 99) throw std::runtime_error("too many ring closures");
        ring_events_[v].emplace_back(b, num);  // opening (earlier atom)
        ring_events_[u].emplace_back(b, num);  // closing
      }
    }
  }

  void emit(int u, std::string& out) const {
    out += atom_token(u);
    for (const auto& [b, num] : ring_events_[u]) {
      out += bond_token(b);
      if (num < 10) {
        out += static_cast<char>('0' + num);
      } else {
        out += '%';
        out += static_cast<char>('0' + num / 10);
        out += static_cast<char>('0' + num % 10);
      }
    }
    const auto& kids = children_[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const auto& [b, v] = kids[i];
      const bool last = i + 1 == kids.size();
      if (!last) out += '(';
      out += bond_token(b);
      emit(v, out);
      if (!last) out += ')';
    }
  }

  std::string bond_token(int b) const {
    const Bond& bd = g_.bond(b);
    const bool both_aromatic = g_.atom(bd.a).aromatic && g_.atom(bd.b).aromatic;
    switch (bd.order) {
      case BondOrder::Single: return both_aromatic ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return both_aromatic ? "" : ":";
    }
    return "";
  }

  std::string atom_token(int u) const {
    const Atom& a = g_.atom(u);
    std::string sym = a.element;
    if (a.aromatic)
      for (auto& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const bool plain = is_organic_subset(a.element) && a.charge == 0 &&
                       a.hydrogens == g_.implicit_hydrogens(u);
    if (plain) return sym;
    std::string out = "[" + sym;
    if (a.hydrogens > 0) {
      out += 'H';
      if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
    }
    if (a.charge != 0) {
      out += a.charge > 0 ? '+' : '-';
      const int mag = a.charge > 0 ? a.charge : -a.charge;
      if (mag > 1) out += std::to_string(mag);
    }
    out += ']';
    return out;
  }

  const MoleculeGraph& g_;
  const std::vector<std::uint64_t>& colors_;
  std::vector<bool> visited_;
  std::vector<std::vector<std::pair<int, int>>> children_;
  std::vector<std::vector<std::pair<int, int>>> ring_events_;
  std::set<int> ring_bond_seen_;
  int ring_count_ = 0;
};

inline constexpr std::size_t kMaxCanonicalLeaves = 1 << 16;

inline void enumerate_discrete(const MoleculeGraph& g,
                               std::vector<std::uint64_t> colors,
                               std::string& best, std::size_t& leaves) {
  refine_colors(g, colors);
  if (distinct_count(colors) == colors.size()) {
    if (++leaves > kMaxCanonicalLeaves)
      throw std::runtime_error("canonicalization tie-break budget exceeded");
    CanonicalWriter writer(g, colors);
    std::string s = writer.write();
    if (best.empty() || s < best) best = std::move(s);
    return;
  }
  // Pick the tied class with the smallest color value and try every member.
  std::map<std::uint64_t, std::vector<int>> classes;
  for (int i = 0; i < g.atom_count(); ++i) classes[colors[i]].push_back(i);
  for (const auto& [color, members] : classes) {
    if (members.size() < 2) continue;
    for (int atom : members) {
      auto branched = colors;
      FnvHasher h;
      h.put_u64(branched[atom]);
      h.put_byte(0xA5);
      branched[atom] = h.value();
      enumerate_discrete(g, std::move(branched), best, leaves);
    }
    return;
  }
}

}  // namespace detail

// Canonical form of a single connected molecule graph.
inline std::string canonical_smiles(const MoleculeGraph& g) {
  if (g.atom_count() == 0) throw std::invalid_argument("empty molecule");
  std::string best;
  std::size_t leaves = 0;
  detail::enumerate_discrete(g, detail::initial_colors(g), best, leaves);
  return best;
}

// Stable molecule identity: equal text means same molecule under this engine.
struct CanonicalSmiles {
  std::string text;

  CanonicalSmiles() = default;
  explicit CanonicalSmiles(std::string t) : text(std::move(t)) {}

  friend bool operator==(const CanonicalSmiles& a, const CanonicalSmiles& b) {
    return a.text == b.text;
  }
  friend bool operator!=(const CanonicalSmiles& a, const CanonicalSmiles& b) {
    return a.text != b.text;
  }
  friend bool operator<(const CanonicalSmiles& a, const CanonicalSmiles& b) {
    return a.text < b.text;
  }
};

// Parses and canonicalizes; multi-fragment input yields fragment canonicals
// sorted and joined with '.'.
inline CanonicalSmiles canonicalize(std::string_view smiles) {
  auto frags = parse_smiles(smiles);
  std::vector<std::string> parts;
  parts.reserve(frags.size());
  for (const auto& g : frags) parts.push_back(canonical_smiles(g));
  std::sort(parts.begin(), parts.end());
  std::string joined;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) joined += '.';
    joined += parts[i];
  }
  return CanonicalSmiles(std::move(joined));
}

}  // namespace larc::chem

template <>
struct std::hash<larc::chem::CanonicalSmiles> {
  std::size_t operator()(const larc::chem::CanonicalSmiles& c) const noexcept {
    return std::hash<std::string>{}(c.text);
  }
};
