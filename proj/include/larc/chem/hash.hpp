// Stable 64-bit hashing of atom environments. All multi-byte values are
// serialized little-endian so codes are identical across platforms.
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace larc::chem {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

class FnvHasher {
public:
  void put_byte(std::uint8_t b) {
    state_ ^= b;
    state_ *= kFnvPrime;
  }
  void put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) put_byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void put_i32(std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) put_byte(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  std::uint64_t value() const { return state_; }

private:
  std::uint64_t state_ = kFnvOffset;
};

// Round-0 atom invariant: (element, degree, charge, H count, aromatic, ring).
// The element is serialized as two bytes (second 0 for one-letter symbols).
inline std::uint64_t hash_atom_invariant(std::string_view element, int degree,
                                         int charge, int hydrogens,
                                         bool aromatic, bool in_ring) {
  FnvHasher h;
  h.put_byte(static_cast<std::uint8_t>(element.size() > 0 ? element[0] : 0));
  h.put_byte(static_cast<std::uint8_t>(element.size() > 1 ? element[1] : 0));
  h.put_i32(degree);
  h.put_i32(charge);
  h.put_i32(hydrogens);
  h.put_byte(aromatic ? 1 : 0);
  h.put_byte(in_ring ? 1 : 0);
  return h.value();
}

// Round-k code: own previous code plus sorted (bond order, neighbor code)
// pairs. `pairs` must already be sorted by the caller.
inline std::uint64_t hash_neighborhood(
    std::uint64_t own,
    const std::vector<std::pair<std::uint8_t, std::uint64_t>>& pairs) {
  FnvHasher h;
  h.put_u64(own);
  for (const auto& [order, code] : pairs) {
    h.put_byte(order);
    h.put_u64(code);
  }
  return h.value();
}

}  // namespace larc::chem
