// Brute-force route oracle: exhaustive depth-bounded backward enumeration of
// every complete route (all leaves in stock), with hazard labels. Exceeding
// the enumeration cap is an explicit error, never silent truncation.
#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "larc/synthesizer/reaction.hpp"
#include "larc/toolbox/hazard_list.hpp"

namespace larc::harness {

class OracleOverflow : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OracleRoute {
  std::vector<synthesizer::Reaction> reactions;  // root-first
  std::set<std::string> molecules;               // every molecule touched
  bool hits_carcinogen = false;
  bool hits_pyrophoric = false;

  std::size_t length() const { return reactions.size(); }
  bool hazard_free() const { return !hits_carcinogen && !hits_pyrophoric; }
};

namespace detail {

struct OracleState {
  const synthesizer::ReactionDb* db;
  const synthesizer::Stock* stock;
  std::size_t cap;
  std::size_t steps = 0;

  void tick() {
    if (++steps > cap)
      throw OracleOverflow("oracle enumeration exceeded cap of " +
                           std::to_string(cap));
  }
};

// All reaction sets that completely resolve `m` within `depth` levels.
// Stock molecules resolve with the empty set; enumeration stops at stock.
inline std::vector<std::vector<const synthesizer::Reaction*>> resolve(
    OracleState& st, const chem::CanonicalSmiles& m, int depth) {
  st.tick();
  if (st.stock->contains(m)) return {{}};
  if (depth <= 0) return {};
  std::vector<std::vector<const synthesizer::Reaction*>> out;
  for (const synthesizer::Reaction* r : st.db->producing(m)) {
    std::vector<std::vector<const synthesizer::Reaction*>> partial = {{r}};
    bool feasible = true;
    for (const auto& reactant : r->reactants) {
      auto sub = resolve(st, reactant, depth - 1);
      if (sub.empty()) {
        feasible = false;
        break;
      }
      std::vector<std::vector<const synthesizer::Reaction*>> merged;
      for (const auto& left : partial) {
        for (const auto& right : sub) {
          st.tick();
          auto combo = left;
          combo.insert(combo.end(), right.begin(), right.end());
          merged.push_back(std::move(combo));
        }
      }
      partial = std::move(merged);
    }
    if (!feasible) continue;
    for (auto& combo : partial) out.push_back(std::move(combo));
  }
  return out;
}

}  // namespace detail

// max_depth bounds the longest product-to-leaf chain, in reactions. A target
// already in stock yields a single empty route.
inline std::vector<OracleRoute> oracle_routes(
    const chem::CanonicalSmiles& target, const synthesizer::ReactionDb& db,
    const synthesizer::Stock& stock, const toolbox::HazardList& carcinogens,
    const toolbox::HazardList& pyrophorics, int max_depth,
    std::size_t cap = 1'000'000) {
  if (max_depth <= 0) return {};
  detail::OracleState st{&db, &stock, cap};
  auto resolutions = detail::resolve(st, target, max_depth);

  // Deduplicate by reaction-key set, keep deterministic order.
  std::set<std::string> seen;
  std::vector<OracleRoute> routes;
  for (const auto& combo : resolutions) {
    std::vector<std::string> keys;
    std::vector<const synthesizer::Reaction*> unique;
    std::set<std::string> in_combo;
    for (const auto* r : combo) {
      if (in_combo.insert(r->key()).second) unique.push_back(r);
    }
    // A molecule with two producers is not a consistent route; such combos
    // arise when shared reactants were resolved differently per branch.
    std::set<std::string> produced;
    bool consistent = true;
    for (const auto* r : unique)
      if (!produced.insert(r->product.text).second) consistent = false;
    if (!consistent) continue;

    for (const auto* r : unique) keys.push_back(r->key());
    std::sort(keys.begin(), keys.end());
    std::string fingerprint;
    for (const auto& k : keys) fingerprint += k + ";";
    if (!seen.insert(fingerprint).second) continue;

    OracleRoute route;
    route.molecules.insert(target.text);
    for (const auto* r : unique) {
      route.reactions.push_back(*r);
      route.molecules.insert(r->product.text);
      for (const auto& m : r->reactants) route.molecules.insert(m.text);
    }
    for (const auto& m : route.molecules) {
      const chem::CanonicalSmiles c{m};
      if (carcinogens.contains(c)) route.hits_carcinogen = true;
      if (pyrophorics.contains(c)) route.hits_pyrophoric = true;
    }
    routes.push_back(std::move(route));
  }
  std::sort(routes.begin(), routes.end(),
            [](const OracleRoute& a, const OracleRoute& b) {
              if (a.length() != b.length()) return a.length() < b.length();
              std::string ka, kb;
              for (const auto& r : a.reactions) ka += r.id + ";";
              for (const auto& r : b.reactions) kb += r.id + ";";
              return ka < kb;
            });
  return routes;
}

}  // namespace larc::harness
