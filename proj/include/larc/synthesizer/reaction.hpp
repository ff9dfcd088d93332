// Retro reactions, the reaction database (one-step expansion backend) and the
// purchasable stock set.
#pragma once

#include <algorithm>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "larc/chem/canonical.hpp"

namespace larc::synthesizer {

struct Reaction {
  std::vector<chem::CanonicalSmiles> reactants;
  chem::CanonicalSmiles product;
  std::string id;

  // Order-insensitive identity: sorted reactants, ">>", product.
  std::string key() const {
    std::vector<std::string> parts;
    parts.reserve(reactants.size());
    for (const auto& r : reactants) parts.push_back(r.text);
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out += '.';
      out += parts[i];
    }
    out += ">>";
    out += product.text;
    return out;
  }

  std::vector<chem::CanonicalSmiles> molecules() const {
    auto out = reactants;
    out.push_back(product);
    return out;
  }

  friend bool operator==(const Reaction& a, const Reaction& b) {
    return a.key() == b.key();
  }
};

inline Reaction make_reaction(std::string id,
                              const std::vector<std::string>& reactants,
                              const std::string& product) {
  Reaction r;
  r.id = std::move(id);
  r.product = chem::canonicalize(product);
  if (reactants.empty())
    throw std::invalid_argument("reaction needs at least one reactant: " + r.id);
  for (const auto& s : reactants) {
    auto c = chem::canonicalize(s);
    if (c == r.product)
      throw std::invalid_argument("product among reactants: " + r.id);
    r.reactants.push_back(std::move(c));
  }
  return r;
}

// JSON-lines database: {"id": .., "reactants": [..], "product": ..} per line,
// canonicalized and indexed by product on load.
class ReactionDb {
public:
  void add(Reaction r) {
    const std::string k = r.key();
    if (!keys_.insert(k).second) return;
    reactions_.push_back(std::move(r));
    index_[reactions_.back().product.text].push_back(reactions_.size() - 1);
  }

  std::size_t size() const { return reactions_.size(); }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  // Reactions producing `m`, in insertion order.
  std::vector<const Reaction*> producing(const chem::CanonicalSmiles& m) const {
    std::vector<const Reaction*> out;
    auto it = index_.find(m.text);
    if (it == index_.end()) return out;
    out.reserve(it->second.size());
    for (auto idx : it->second) out.push_back(&reactions_[idx]);
    return out;
  }

  static ReactionDb load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reaction db: " + path);
    ReactionDb db;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      try {
        auto j = nlohmann::json::parse(line);
        db.add(make_reaction(j.value("id", "r" + std::to_string(line_no)),
                             j.at("reactants").get<std::vector<std::string>>(),
                             j.at("product").get<std::string>()));
      } catch (const std::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                                 e.what());
      }
    }
    return db;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write reaction db: " + path);
    for (const auto& r : reactions_) {
      nlohmann::json j;
      j["id"] = r.id;
      std::vector<std::string> rs;
      for (const auto& m : r.reactants) rs.push_back(m.text);
      j["reactants"] = rs;
      j["product"] = r.product.text;
      out << j.dump() << '\n';
    }
  }

private:
  std::vector<Reaction> reactions_;
  std::unordered_set<std::string> keys_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

// Newline-delimited SMILES, canonicalized on load.
class Stock {
public:
  void add(std::string_view smiles) { set_.insert(chem::canonicalize(smiles).text); }
  void add_canonical(const chem::CanonicalSmiles& c) { set_.insert(c.text); }

  bool contains(const chem::CanonicalSmiles& m) const {
    return set_.count(m.text) > 0;
  }
  std::size_t size() const { return set_.size(); }

  static Stock load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stock file: " + path);
    Stock stock;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      stock.add(line);
    }
    return stock;
  }

  void save(const std::string& path) const {
    std::vector<std::string> sorted(set_.begin(), set_.end());
    std::sort(sorted.begin(), sorted.end());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stock file: " + path);
    for (const auto& s : sorted) out << s << '\n';
  }

private:
  std::unordered_set<std::string> set_;
};

}  // namespace larc::synthesizer
