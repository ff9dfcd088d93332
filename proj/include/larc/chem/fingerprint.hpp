// Circular fingerprints by iterative neighborhood hashing, plus Tanimoto
// similarity over the resulting bit sets.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "larc/chem/hash.hpp"
#include "larc/chem/molecule.hpp"

namespace larc::chem {

class Fingerprint {
public:
  Fingerprint() : nbits_(0) {}
  explicit Fingerprint(int nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {
    if (nbits <= 0 || (nbits & (nbits - 1)) != 0)
      throw std::invalid_argument("fingerprint width must be a power of two");
  }

  int width() const { return nbits_; }

  void set(int bit) { words_.at(bit / 64) |= (1ull << (bit % 64)); }

  bool test(int bit) const {
    return (words_.at(bit / 64) >> (bit % 64)) & 1ull;
  }

  int popcount() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const Fingerprint& a, const Fingerprint& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

private:
  int nbits_;
  std::vector<std::uint64_t> words_;
};

// Round 0 hashes each atom's invariant tuple; round k hashes the previous
// code together with sorted (bond order, neighbor code) pairs. Every code
// from every round sets bit (code mod nbits).
inline Fingerprint morgan_fingerprint(const MoleculeGraph& g, int radius = 2,
                                      int nbits = 2048) {
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  Fingerprint fp(nbits);
  const int n = g.atom_count();
  std::vector<std::uint64_t> codes(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = g.atom(i);
    codes[i] = hash_atom_invariant(a.element, g.degree(i), a.charge,
                                   a.hydrogens, a.aromatic, a.in_ring);
    fp.set(static_cast<int>(codes[i] % static_cast<std::uint64_t>(nbits)));
  }
  std::vector<std::uint64_t> next(n);
  for (int round = 1; round <= radius; ++round) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint8_t, std::uint64_t>> pairs;
      pairs.reserve(g.incident(i).size());
      for (int b : g.incident(i))
        pairs.emplace_back(static_cast<std::uint8_t>(g.bond(b).order),
                           codes[g.other_end(b, i)]);
      std::sort(pairs.begin(), pairs.end());
      next[i] = hash_neighborhood(codes[i], pairs);
      fp.set(static_cast<int>(next[i] % static_cast<std::uint64_t>(nbits)));
    }
    codes = next;
  }
  return fp;
}

// |a AND b| / |a OR b|; 1.0 when both sets are empty.
inline double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width())
    throw std::invalid_argument("fingerprint width mismatch");
  int inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    inter += std::popcount(a.words()[i] & b.words()[i]);
    uni += std::popcount(a.words()[i] | b.words()[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace larc::chem
