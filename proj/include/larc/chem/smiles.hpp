// SMILES reader for the subset this engine needs: organic-subset atoms,
// bracket atoms with isotope/H-count/charge, bonds - = # :, branches,
// ring closures (digit and %nn), "." fragment separation. Stereo markers
// (/ \ @ @@) and isotopes are accepted and discarded.
#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "larc/chem/molecule.hpp"

namespace larc::chem {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

namespace detail {

inline const std::unordered_map<std::string, int>& element_table() {
  static const std::unordered_map<std::string, int> table = {
      {"H", 1},    {"He", 2},  {"Li", 3},  {"Be", 4},  {"B", 5},
      {"C", 6},    {"N", 7},   {"O", 8},   {"F", 9},   {"Ne", 10},
      {"Na", 11},  {"Mg", 12}, {"Al", 13}, {"Si", 14}, {"P", 15},
      {"S", 16},   {"Cl", 17}, {"Ar", 18}, {"K", 19},  {"Ca", 20},
      {"Ti", 22},  {"Cr", 24}, {"Mn", 25}, {"Fe", 26}, {"Co", 27},
      {"Ni", 28},  {"Cu", 29}, {"Zn", 30}, {"Ga", 31}, {"Ge", 32},
      {"As", 33},  {"Se", 34}, {"Br", 35}, {"Kr", 36}, {"Zr", 40},
      {"Mo", 42},  {"Ru", 44}, {"Rh", 45}, {"Pd", 46}, {"Ag", 47},
      {"Cd", 48},  {"In", 49}, {"Sn", 50}, {"Sb", 51}, {"Te", 52},
      {"I", 53},   {"Xe", 54}, {"Cs", 55}, {"Ba", 56}, {"W", 74},
      {"Os", 76},  {"Ir", 77}, {"Pt", 78}, {"Au", 79}, {"Hg", 80},
      {"Tl", 81},  {"Pb", 82}, {"Bi", 83},
  };
  return table;
}

inline bool known_element(const std::string& sym) {
  return element_table().count(sym) > 0;
}

inline bool aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct PendingBond {
  BondOrder order = BondOrder::Single;
  bool explicit_order = false;
  std::size_t offset = 0;
};

struct RingOpening {
  int atom = -1;
  PendingBond bond;
  std::size_t offset = 0;
};

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<MoleculeGraph> run() {
    if (text_.empty()) throw ParseError("empty SMILES", 0);
    begin_fragment();
    while (pos_ < text_.size()) step();
    finish_fragment(text_.size());
    return std::move(fragments_);
  }

private:
  void begin_fragment() {
    mol_ = MoleculeGraph();
    prev_atom_ = -1;
    pending_.reset();
    rings_.clear();
    branch_stack_.clear();
    hydrogens_fixed_.clear();
  }

  void finish_fragment(std::size_t at) {
    if (pending_) throw ParseError("dangling bond", pending_->offset);
    if (!branch_stack_.empty())
      throw ParseError("unbalanced parenthesis", branch_stack_.back().second);
    for (const auto& [num, open] : rings_)
      throw ParseError("unmatched ring closure", open.offset);
    if (mol_.atom_count() == 0) throw ParseError("empty fragment", at);
    for (int i = 0; i < mol_.atom_count(); ++i) {
      if (!hydrogens_fixed_[i])
        mol_.atom(i).hydrogens = mol_.implicit_hydrogens(i);
    }
    mol_.perceive_rings();
    fragments_.push_back(std::move(mol_));
  }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '-': case '=': case '#': case ':': case '/': case '\\':
        read_bond(c);
        return;
      case '(':
        if (prev_atom_ < 0)
          throw ParseError("unbalanced parenthesis", pos_);
        branch_stack_.emplace_back(prev_atom_, pos_);
        ++pos_;
        return;
      case ')':
        if (pending_) throw ParseError("dangling bond", pending_->offset);
        if (branch_stack_.empty())
          throw ParseError("unbalanced parenthesis", pos_);
        prev_atom_ = branch_stack_.back().first;
        branch_stack_.pop_back();
        ++pos_;
        return;
      case '.': {
        if (!branch_stack_.empty())
          throw ParseError("fragment separator inside branch", pos_);
        const std::size_t at = pos_;
        ++pos_;
        finish_fragment(at);
        if (pos_ >= text_.size())
          throw ParseError("empty fragment", pos_);
        begin_fragment();
        return;
      }
      case '%':
        read_ring_closure();
        return;
      case '[':
        read_bracket_atom();
        return;
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          read_ring_closure();
          return;
        }
        read_organic_atom();
        return;
    }
  }

  void read_bond(char c) {
    if (pending_) throw ParseError("dangling bond", pending_->offset);
    if (prev_atom_ < 0) throw ParseError("bond with no preceding atom", pos_);
    PendingBond pb;
    pb.offset = pos_;
    pb.explicit_order = true;
    switch (c) {
      case '-': pb.order = BondOrder::Single; break;
      case '=': pb.order = BondOrder::Double; break;
      case '#': pb.order = BondOrder::Triple; break;
      case ':': pb.order = BondOrder::Aromatic; break;
      case '/': case '\\': pb.order = BondOrder::Single; break;
    }
    pending_ = pb;
    ++pos_;
  }

  void read_ring_closure() {
    const std::size_t at = pos_;
    int num = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        throw ParseError("unmatched ring closure", at);
      num = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      num = text_[pos_] - '0';
      ++pos_;
    }
    if (prev_atom_ < 0)
      throw ParseError("ring closure with no preceding atom", at);

    PendingBond pb;
    if (pending_) {
      pb = *pending_;
      pending_.reset();
    }

    auto it = rings_.find(num);
    if (it == rings_.end()) {
      rings_[num] = RingOpening{prev_atom_, pb, at};
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == prev_atom_)
      throw ParseError("unmatched ring closure", at);  // self-bond
    if (mol_.bond_between(open.atom, prev_atom_) >= 0)
      throw ParseError("unmatched ring closure", at);  // duplicate bond
    BondOrder order;
    if (open.bond.explicit_order && pb.explicit_order &&
        open.bond.order != pb.order)
      throw ParseError("unmatched ring closure", at);  // order conflict
    if (open.bond.explicit_order)
      order = open.bond.order;
    else if (pb.explicit_order)
      order = pb.order;
    else
      order = (mol_.atom(open.atom).aromatic && mol_.atom(prev_atom_).aromatic)
                  ? BondOrder::Aromatic
                  : BondOrder::Single;
    mol_.add_bond(open.atom, prev_atom_, order);
  }

  void read_organic_atom() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    std::string sym;
    bool aromatic = false;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      sym = "Cl";
      pos_ += 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      sym = "Br";
      pos_ += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' ||
               c == 'S' || c == 'F' || c == 'I') {
      sym.assign(1, c);
      ++pos_;
    } else if (aromatic_symbol(c)) {
      sym.assign(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      aromatic = true;
      ++pos_;
    } else {
      throw ParseError("unknown atom symbol", at);
    }
    Atom a;
    a.element = sym;
    a.aromatic = aromatic;
    attach_atom(std::move(a), /*explicit_h=*/false, at);
  }

  void read_bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;  // consume '['
    Atom a;
    // isotope (parsed, discarded)
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ >= text_.size()) throw ParseError("unterminated bracket atom", at);

    // element symbol
    const std::size_t sym_at = pos_;
    char c = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      ++pos_;
      if (pos_ < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_])) &&
          detail::known_element(sym + text_[pos_])) {
        sym += text_[pos_];
        ++pos_;
      }
      if (!detail::known_element(sym))
        throw ParseError("unknown atom symbol", sym_at);
      a.element = sym;
    } else if (aromatic_symbol(c)) {
      a.element.assign(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      a.aromatic = true;
      ++pos_;
    } else {
      throw ParseError("unknown atom symbol", sym_at);
    }

    // chirality (discarded)
    while (pos_ < text_.size() && text_[pos_] == '@') ++pos_;

    // explicit hydrogen count
    int hcount = 0;
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      hcount = 1;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        hcount = text_[pos_] - '0';
        ++pos_;
      }
    }
    a.hydrogens = hcount;

    // charge
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign_char = text_[pos_];
      const int sign = sign_char == '+' ? 1 : -1;
      int magnitude = 0;
      while (pos_ < text_.size() && text_[pos_] == sign_char) {
        ++magnitude;
        ++pos_;
      }
      if (magnitude == 1 && pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          magnitude = magnitude * 10 + (text_[pos_] - '0');
          ++pos_;
        }
      }
      a.charge = sign * magnitude;
    }

    // atom class (discarded)
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      if (pos_ >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("unterminated bracket atom", at);
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }

    if (pos_ >= text_.size() || text_[pos_] != ']')
      throw ParseError("unterminated bracket atom", at);
    ++pos_;
    attach_atom(std::move(a), /*explicit_h=*/true, at);
  }

  void attach_atom(Atom a, bool explicit_h, std::size_t at) {
    const bool aromatic = a.aromatic;
    const int idx = mol_.add_atom(std::move(a));
    hydrogens_fixed_.resize(mol_.atom_count(), false);
    hydrogens_fixed_[idx] = explicit_h;
    if (prev_atom_ >= 0) {
      BondOrder order;
      if (pending_) {
        order = pending_->order;
        pending_.reset();
      } else {
        order = (mol_.atom(prev_atom_).aromatic && aromatic)
                    ? BondOrder::Aromatic
                    : BondOrder::Single;
      }
      if (mol_.bond_between(prev_atom_, idx) >= 0)
        throw ParseError("duplicate bond", at);
      mol_.add_bond(prev_atom_, idx, order);
    } else if (pending_) {
      throw ParseError("dangling bond", pending_->offset);
    }
    prev_atom_ = idx;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  MoleculeGraph mol_;
  std::vector<MoleculeGraph> fragments_;
  std::vector<bool> hydrogens_fixed_;
  int prev_atom_ = -1;
  std::optional<PendingBond> pending_;
  std::unordered_map<int, RingOpening> rings_;
  std::vector<std::pair<int, std::size_t>> branch_stack_;  // (atom, '(' offset)
};

}  // namespace detail

// One graph per "."-separated fragment. Throws ParseError with a byte offset.
inline std::vector<MoleculeGraph> parse_smiles(std::string_view text) {
  return detail::Reader(text).run();
}

}  // namespace larc::chem
