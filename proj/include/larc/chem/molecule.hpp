// Molecular graph: atoms, bonds, ring perception, implicit hydrogens.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace larc::chem {

enum class BondOrder : std::uint8_t {
  Single = 1,
  Double = 2,
  Triple = 3,
  Aromatic = 4,
};

inline double bond_valence(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 1.0;
}

struct Atom {
  std::string element;   // periodic-table symbol, e.g. "C", "Cl"
  int charge = 0;
  int hydrogens = 0;     // effective H count (bracket-specified or implicit)
  bool aromatic = false;
  bool in_ring = false;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
};

// Default valences used for implicit hydrogen counts on bare organic-subset
// atoms. Bracket atoms always carry an explicit H count.
inline int default_valence(std::string_view element) {
  if (element == "B") return 3;
  if (element == "C") return 4;
  if (element == "N") return 3;
  if (element == "O") return 2;
  if (element == "P") return 3;
  if (element == "S") return 2;
  if (element == "F" || element == "Cl" || element == "Br" || element == "I")
    return 1;
  return -1;
}

inline bool is_organic_subset(std::string_view element) {
  return default_valence(element) >= 0;
}

class MoleculeGraph {
public:
  MoleculeGraph() = default;

  int add_atom(Atom a) {
    atoms_.push_back(std::move(a));
    adjacency_.emplace_back();
    return static_cast<int>(atoms_.size()) - 1;
  }

  void add_bond(int a, int b, BondOrder order) {
    if (a < 0 || b < 0 || a >= atom_count() || b >= atom_count())
      throw std::out_of_range("bond endpoint out of range");
    if (a == b) throw std::invalid_argument("self-bond");
    if (bond_between(a, b) >= 0) throw std::invalid_argument("duplicate bond");
    const int idx = static_cast<int>(bonds_.size());
    bonds_.push_back(Bond{a, b, order});
    adjacency_[a].push_back(idx);
    adjacency_[b].push_back(idx);
  }

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  const Atom& atom(int i) const { return atoms_.at(i); }
  Atom& atom(int i) { return atoms_.at(i); }
  const Bond& bond(int i) const { return bonds_.at(i); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  // Bond indices incident to atom i.
  const std::vector<int>& incident(int i) const { return adjacency_.at(i); }

  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }

  int other_end(int bond_idx, int atom_idx) const {
    const Bond& bd = bonds_.at(bond_idx);
    return bd.a == atom_idx ? bd.b : bd.a;
  }

  int bond_between(int a, int b) const {
    for (int idx : adjacency_.at(a)) {
      const Bond& bd = bonds_[idx];
      if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a)) return idx;
    }
    return -1;
  }

  bool connected() const {
    if (atoms_.empty()) return false;
    std::vector<char> seen(atoms_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int idx : adjacency_[u]) {
        int v = other_end(idx, u);
        if (!seen[v]) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    return reached == atom_count();
  }

  // Marks in_ring on every atom that lies on a cycle (bridge detection).
  void perceive_rings() {
    const int n = atom_count();
    for (auto& a : atoms_) a.in_ring = false;
    if (n == 0) return;
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<char> bond_is_bridge(bonds_.size(), 0);
    int timer = 0;

    // Iterative DFS; recursion depth is unbounded on long chains otherwise.
    struct Frame {
      int node;
      int parent_bond;
      std::size_t next_edge;
    };
    for (int root = 0; root < n; ++root) {
      if (disc[root] != -1) continue;
      std::vector<Frame> stack;
      disc[root] = low[root] = timer++;
      stack.push_back({root, -1, 0});
      while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_edge < adjacency_[f.node].size()) {
          const int bidx = adjacency_[f.node][f.next_edge++];
          if (bidx == f.parent_bond) continue;
          const int v = other_end(bidx, f.node);
          if (disc[v] == -1) {
            disc[v] = low[v] = timer++;
            stack.push_back({v, bidx, 0});
          } else {
            low[f.node] = std::min(low[f.node], disc[v]);
          }
        } else {
          const Frame done = f;
          stack.pop_back();
          if (!stack.empty()) {
            Frame& up = stack.back();
            low[up.node] = std::min(low[up.node], low[done.node]);
            if (low[done.node] > disc[up.node])
              bond_is_bridge[done.parent_bond] = 1;
          }
        }
      }
    }
    for (std::size_t i = 0; i < bonds_.size(); ++i) {
      if (!bond_is_bridge[i]) {
        atoms_[bonds_[i].a].in_ring = true;
        atoms_[bonds_[i].b].in_ring = true;
      }
    }
  }

  // Sum of bond valences at atom i (aromatic counts 1.5).
  double bond_order_sum(int i) const {
    double s = 0;
    for (int idx : adjacency_.at(i)) s += bond_valence(bonds_[idx].order);
    return s;
  }

  // Implicit H count for a bare organic-subset atom given its bonds.
  int implicit_hydrogens(int i) const {
    const int dv = default_valence(atoms_.at(i).element);
    if (dv < 0) return 0;
    const double s = bond_order_sum(i);
    const int used = static_cast<int>(s) < s ? static_cast<int>(s) + 1
                                             : static_cast<int>(s);
    return std::max(0, dv - used);
  }

  // For programmatically built graphs: fill every atom's hydrogen count from
  // the default-valence rule.
  void assign_implicit_hydrogens() {
    for (int i = 0; i < atom_count(); ++i)
      atoms_[i].hydrogens = implicit_hydrogens(i);
  }

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace larc::chem
