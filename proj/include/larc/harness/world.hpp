// Synthetic desk-scale worlds: a layered acyclic reaction network over small
// generated molecules, a stock layer, hazard labels, and optional planted
// routes (one guaranteed hazard-free, optionally one shorter hazardous decoy)
// to a designated target.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "larc/chem/canonical.hpp"
#include "larc/chem/molecule.hpp"
#include "larc/evaluator/constraint.hpp"
#include "larc/synthesizer/reaction.hpp"
#include "larc/toolbox/hazard_list.hpp"

namespace larc::harness {

// splitmix64: tiny, seedable, identical on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double unit() { return (next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

private:
  std::uint64_t state_;
};

struct WorldParams {
  int n_molecules = 30;
  int n_reactions = 25;
  int max_reactants = 3;
  double stock_fraction = 0.4;
  double hazard_fraction = 0.15;
  bool guarantee_safe_route = true;
  bool plant_decoy = false;
  evaluator::ConstraintKind decoy_kind =
      evaluator::ConstraintKind::AvoidCarcinogens;

  void validate() const {
    if (n_molecules < 4 || n_reactions < 1 || max_reactants < 1)
      throw std::invalid_argument("world parameters must be positive");
    if (stock_fraction <= 0.0 || stock_fraction >= 1.0)
      throw std::invalid_argument("stock_fraction must be in (0,1)");
    if (hazard_fraction < 0.0 || hazard_fraction >= 1.0)
      throw std::invalid_argument("hazard_fraction must be in [0,1)");
  }
};

struct World {
  synthesizer::ReactionDb db;
  synthesizer::Stock stock;
  toolbox::HazardList carcinogens{"carcinogens"};
  toolbox::HazardList pyrophorics{"pyrophorics"};
  chem::CanonicalSmiles target;
  std::vector<synthesizer::Reaction> planted_safe;
  std::vector<synthesizer::Reaction> planted_decoy;
  std::uint64_t seed = 0;
  WorldParams params;

  void write(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    db.save((dir / "reactions.jsonl").string());
    stock.save((dir / "stock.txt").string());
    write_list(carcinogens, dir / "carcinogens.tsv");
    write_list(pyrophorics, dir / "pyrophorics.tsv");
    nlohmann::json j;
    j["seed"] = seed;
    j["target"] = target.text;
    j["n_molecules"] = params.n_molecules;
    j["n_reactions"] = params.n_reactions;
    j["stock_fraction"] = params.stock_fraction;
    j["hazard_fraction"] = params.hazard_fraction;
    j["guarantee_safe_route"] = params.guarantee_safe_route;
    j["plant_decoy"] = params.plant_decoy;
    auto route_ids = [](const std::vector<synthesizer::Reaction>& rs) {
      std::vector<std::string> ids;
      for (const auto& r : rs) ids.push_back(r.id);
      return ids;
    };
    j["planted_safe"] = route_ids(planted_safe);
    j["planted_decoy"] = route_ids(planted_decoy);
    std::ofstream out(dir / "world.json");
    out << j.dump(2) << '\n';
  }

private:
  static void write_list(const toolbox::HazardList& list,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "# generated hazard list: " << list.name() << '\n';
    for (const auto& e : list.entries())
      out << e.smiles.text << '\t' << e.label << '\n';
  }
};

namespace detail {

// Random acyclic molecule over C/N/O with single bonds, 1..max_atoms heavy
// atoms, returned in canonical form.
inline std::string random_molecule(Rng& rng, int max_atoms) {
  const int n = 1 + rng.below(max_atoms);
  chem::MoleculeGraph g;
  for (int i = 0; i < n; ++i) g.add_atom(chem::Atom{"C", 0, 0, false, false});
  for (int i = 1; i < n; ++i) {
    int parent = rng.below(i);
    for (int tries = 0; tries < 8 && g.degree(parent) >= 3; ++tries)
      parent = rng.below(i);
    if (g.degree(parent) >= 4) parent = 0;
    g.add_bond(parent, i, chem::BondOrder::Single);
  }
  for (int i = 0; i < n; ++i) {
    if (g.degree(i) <= 2 && rng.chance(0.18))
      g.atom(i).element = "N";
    else if (g.degree(i) <= 1 && rng.chance(0.2))
      g.atom(i).element = "O";
  }
  g.assign_implicit_hydrogens();
  g.perceive_rings();
  return chem::canonical_smiles(g);
}

}  // namespace detail

class WorldError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline World generate_world(std::uint64_t seed, const WorldParams& params) {
  params.validate();
  Rng rng(seed * 0x9e3779b97f4a7c15ull + 0xd1b54a32d192ed03ull);

  World world;
  world.seed = seed;
  world.params = params;

  // Distinct molecules; duplicates regenerate.
  std::vector<chem::CanonicalSmiles> mols;
  std::set<std::string> seen;
  int attempts = 0;
  while (static_cast<int>(mols.size()) < params.n_molecules) {
    if (++attempts > params.n_molecules * 300)
      throw WorldError("could not generate enough distinct molecules");
    auto s = detail::random_molecule(rng, 9);
    if (seen.insert(s).second) mols.emplace_back(s);
  }

  const int n_stock =
      std::max(1, static_cast<int>(params.stock_fraction * params.n_molecules));
  if (params.n_molecules - n_stock < 4)
    throw WorldError("stock_fraction leaves too few synthesizable molecules");
  for (int i = 0; i < n_stock; ++i) world.stock.add_canonical(mols[i]);

  std::vector<chem::CanonicalSmiles> open(mols.begin() + n_stock, mols.end());
  world.target = open.back();
  open.pop_back();

  auto pick_stock = [&]() { return mols[rng.below(n_stock)]; };
  int rxn_id = 0;
  auto next_id = [&rxn_id](const char* prefix) {
    return std::string(prefix) + std::to_string(rxn_id++);
  };

  std::set<std::string> protected_molecules;  // no extra producers for these
  std::set<std::string> safe_molecules;       // never marked hazardous
  safe_molecules.insert(world.target.text);
  // With planted routes the target keeps exactly those producers; otherwise
  // it joins the random network (and may legitimately end up unreachable).
  if (params.guarantee_safe_route || params.plant_decoy)
    protected_molecules.insert(world.target.text);
  else
    open.push_back(world.target);

  // The decoy route is planted first so it precedes the safe route in
  // insertion order; it is one reaction shorter than the safe route.
  if (params.plant_decoy) {
    if (open.size() < 3) throw WorldError("not enough molecules for decoy");
    const auto hazard_mol = open[0];
    auto d1 = synthesizer::Reaction{};
    d1.id = next_id("d");
    d1.product = world.target;
    d1.reactants = {hazard_mol};
    if (params.max_reactants > 1) d1.reactants.push_back(pick_stock());
    auto d2 = synthesizer::Reaction{};
    d2.id = next_id("d");
    d2.product = hazard_mol;
    d2.reactants = {pick_stock()};
    world.db.add(d1);
    world.db.add(d2);
    world.planted_decoy = {d1, d2};
    protected_molecules.insert(hazard_mol.text);
    if (params.decoy_kind == evaluator::ConstraintKind::AvoidPyrophorics)
      world.pyrophorics.add(hazard_mol.text, "planted decoy hazard");
    else
      world.carcinogens.add(hazard_mol.text, "planted decoy hazard");
  }

  if (params.guarantee_safe_route) {
    const std::size_t base = params.plant_decoy ? 1 : 0;
    const int safe_len = params.plant_decoy ? 3 : 2 + rng.below(2);
    if (open.size() < base + static_cast<std::size_t>(safe_len))
      throw WorldError("not enough molecules for the safe route");
    // Chain: stock -> I_{len-1} -> ... -> I_1 -> target.
    std::vector<chem::CanonicalSmiles> chain;
    for (int i = 0; i < safe_len - 1; ++i) chain.push_back(open[base + i]);
    chem::CanonicalSmiles current = world.target;
    for (const auto& intermediate : chain) {
      synthesizer::Reaction r;
      r.id = next_id("s");
      r.product = current;
      r.reactants = {intermediate};
      if (params.max_reactants > 1 && rng.chance(0.5))
        r.reactants.push_back(pick_stock());
      world.db.add(r);
      world.planted_safe.push_back(r);
      protected_molecules.insert(intermediate.text);
      safe_molecules.insert(intermediate.text);
      current = intermediate;
    }
    synthesizer::Reaction last;
    last.id = next_id("s");
    last.product = current;
    last.reactants = {pick_stock()};
    if (params.max_reactants > 1 && rng.chance(0.5)) {
      auto extra = pick_stock();
      if (extra != last.reactants[0]) last.reactants.push_back(extra);
    }
    world.db.add(last);
    world.planted_safe.push_back(last);
  }

  // Background network: layer every remaining molecule above stock, give each
  // a producing reaction from strictly lower layers (reachability under the
  // guarantee), then random extra reactions up to the requested count.
  std::vector<chem::CanonicalSmiles> background;
  for (const auto& m : open)
    if (!protected_molecules.count(m.text)) background.push_back(m);

  std::vector<std::vector<chem::CanonicalSmiles>> layers;
  layers.push_back(std::vector<chem::CanonicalSmiles>(mols.begin(),
                                                      mols.begin() + n_stock));
  const int n_layers = 2 + rng.below(2);
  layers.resize(1 + n_layers);
  for (std::size_t i = 0; i < background.size(); ++i)
    layers[1 + rng.below(n_layers)].push_back(background[i]);

  auto pick_below = [&](std::size_t layer) {
    std::size_t l = rng.below(static_cast<int>(layer));
    for (int tries = 0; tries < 6 && layers[l].empty(); ++tries)
      l = rng.below(static_cast<int>(layer));
    if (layers[l].empty()) l = 0;
    return layers[l][rng.below(static_cast<int>(layers[l].size()))];
  };

  if (params.guarantee_safe_route) {
    for (std::size_t layer = 1; layer < layers.size(); ++layer) {
      for (const auto& m : layers[layer]) {
        synthesizer::Reaction r;
        r.id = next_id("g");
        r.product = m;
        const int k = 1 + rng.below(params.max_reactants);
        for (int i = 0; i < k; ++i) {
          auto cand = pick_below(layer);
          if (cand == m) continue;
          bool dup = false;
          for (const auto& existing : r.reactants) dup |= existing == cand;
          if (!dup) r.reactants.push_back(cand);
        }
        if (r.reactants.empty()) r.reactants.push_back(pick_stock());
        world.db.add(r);
      }
    }
  }

  int guard = 0;
  while (static_cast<int>(world.db.size()) < params.n_reactions &&
         !background.empty()) {
    if (++guard > params.n_reactions * 50) break;
    std::size_t layer = 1 + rng.below(static_cast<int>(layers.size() - 1));
    if (layers[layer].empty()) continue;
    const auto& product = layers[layer][rng.below(static_cast<int>(layers[layer].size()))];
    synthesizer::Reaction r;
    r.id = next_id("b");
    r.product = product;
    const int k = 1 + rng.below(params.max_reactants);
    for (int i = 0; i < k; ++i) {
      auto cand = pick_below(layer);
      if (cand == product) continue;
      bool dup = false;
      for (const auto& existing : r.reactants) dup |= existing == cand;
      if (!dup) r.reactants.push_back(cand);
    }
    if (r.reactants.empty()) continue;
    world.db.add(r);
  }

  // Hazard labels over background molecules only; planted-safe molecules and
  // the target stay clean so the guaranteed route remains hazard-free.
  bool next_is_carcinogen = true;
  for (const auto& m : background) {
    if (safe_molecules.count(m.text)) continue;
    if (!rng.chance(params.hazard_fraction)) continue;
    if (next_is_carcinogen)
      world.carcinogens.add(m.text, "generated hazard");
    else
      world.pyrophorics.add(m.text, "generated hazard");
    next_is_carcinogen = !next_is_carcinogen;
  }

  return world;
}

}  // namespace larc::harness
