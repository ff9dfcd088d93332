#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "larc/chem/canonical.hpp"
#include "larc/chem/smiles.hpp"

using larc::chem::canonical_smiles;
using larc::chem::canonicalize;
using larc::chem::MoleculeGraph;
using larc::chem::parse_smiles;

namespace {

MoleculeGraph permuted(const MoleculeGraph& g, const std::vector<int>& perm) {
  MoleculeGraph out;
  std::vector<int> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < perm.size(); ++i) out.add_atom(g.atom(perm[i]));
  for (const auto& b : g.bonds()) out.add_bond(inverse[b.a], inverse[b.b], b.order);
  out.perceive_rings();
  return out;
}

}  // namespace

TEST_CASE("same molecule written differently canonicalizes identically") {
  CHECK(canonicalize("OCC") == canonicalize("CCO"));
  CHECK(canonicalize("C(O)C") == canonicalize("CCO"));
  CHECK(canonicalize("c1ccccc1") == canonicalize("c1ccc(cc1)"));
  CHECK(canonicalize("N(C)(C)C") == canonicalize("CN(C)C"));
  CHECK(canonicalize("ClC(Cl)=O") == canonicalize("O=C(Cl)Cl"));
}

TEST_CASE("distinct molecules canonicalize differently") {
  CHECK(canonicalize("C") != canonicalize("N"));
  CHECK(canonicalize("CCO") != canonicalize("CCN"));
  CHECK(canonicalize("C1CCCCC1") != canonicalize("c1ccccc1"));
  CHECK(canonicalize("CC(C)C") != canonicalize("CCCC"));
  CHECK(canonicalize("[NH4+]") != canonicalize("N"));
}

TEST_CASE("canonical form is idempotent") {
  for (const char* s :
       {"CCO", "c1ccccc1", "CC(C)(C)N", "O=C(Cl)Cl", "c1ccc2ccccc2c1",
        "CC(=O)Oc1ccccc1C(=O)O", "[O-]C(=O)C", "C1CC1CO"}) {
    auto c1 = canonicalize(s);
    auto c2 = canonicalize(c1.text);
    CHECK(c1 == c2);
  }
}

TEST_CASE("canonical output is invariant under atom permutations") {
  std::mt19937_64 rng(20240817);
  for (const char* s :
       {"CCO", "c1ccccc1", "CC(C)Cc1ccccc1", "C1CC1CO", "c1ccc2ccccc2c1",
        "O=C(Cl)Cl", "CC(N)C(=O)O", "CCOC(C)CN"}) {
    auto g = parse_smiles(s)[0];
    const std::string expected = canonical_smiles(g);
    std::vector<int> perm(g.atom_count());
    std::iota(perm.begin(), perm.end(), 0);
    for (int trial = 0; trial < 150; ++trial) {
      std::shuffle(perm.begin(), perm.end(), rng);
      auto h = permuted(g, perm);
      REQUIRE(canonical_smiles(h) == expected);
    }
  }
}

TEST_CASE("round trip through the parser preserves identity") {
  for (const char* s :
       {"CCO", "c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O", "[nH]1cccc1",
        "C#CC=CC", "[NH4+].[O-]C(=O)C", "ClCCl", "C1CCCCC1"}) {
    auto c = canonicalize(s);
    CHECK(canonicalize(c.text) == c);
  }
}

TEST_CASE("multi fragment canonical identity sorts fragments") {
  CHECK(canonicalize("CCO.N") == canonicalize("N.OCC"));
}

TEST_CASE("explicit hydrogen brackets normalize to plain atoms when default") {
  CHECK(canonicalize("[CH4]") == canonicalize("C"));
  CHECK(canonicalize("[CH3][CH3]") == canonicalize("CC"));
  CHECK(canonicalize("[C]") != canonicalize("C"));
}
