// Hazard reference lists: canonicalized SMILES entries loaded from
// tab-separated files, with fingerprints precomputed for similarity queries.
#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "larc/chem/canonical.hpp"
#include "larc/chem/fingerprint.hpp"

namespace larc::toolbox {

struct HazardEntry {
  chem::CanonicalSmiles smiles;
  std::string label;
  std::optional<double> probability;
  chem::Fingerprint fingerprint;
};

class HazardList {
public:
  HazardList() = default;
  explicit HazardList(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  const std::vector<HazardEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  void add(std::string_view smiles, std::string label = {},
           std::optional<double> probability = {}) {
    auto canonical = chem::canonicalize(smiles);
    if (index_.count(canonical.text)) return;
    auto frags = chem::parse_smiles(canonical.text);
    HazardEntry e;
    e.smiles = canonical;
    e.label = std::move(label);
    e.probability = probability;
    e.fingerprint = chem::morgan_fingerprint(frags[0]);
    index_.emplace(canonical.text, entries_.size());
    entries_.push_back(std::move(e));
  }

  bool contains(const chem::CanonicalSmiles& m) const {
    return index_.count(m.text) > 0;
  }

  // Lookup probability for a listed molecule (1.0 unless the file says
  // otherwise); 0.0 when absent.
  double lookup_probability(const chem::CanonicalSmiles& m) const {
    auto it = index_.find(m.text);
    if (it == index_.end()) return 0.0;
    return entries_[it->second].probability.value_or(1.0);
  }

  double max_similarity(const chem::Fingerprint& fp) const {
    double best = 0.0;
    for (const auto& e : entries_)
      best = std::max(best, chem::tanimoto(fp, e.fingerprint));
    return best;
  }

  // File format: one record per line, "SMILES<TAB>label<TAB>probability",
  // label and probability optional; lines starting with # are ignored.
  // Tool-facing lists must be non-empty; world loaders pass allow_empty for
  // hazard-free worlds.
  static HazardList load(const std::string& path, std::string name,
                         bool allow_empty = false) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hazard list: " + path);
    HazardList list(std::move(name));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, '\t')) fields.push_back(field);
      if (fields.empty()) continue;
      std::optional<double> prob;
      if (fields.size() > 2 && !fields[2].empty()) {
        try {
          prob = std::stod(fields[2]);
        } catch (const std::exception&) {
          throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                   ": bad probability field");
        }
        if (*prob < 0.0 || *prob > 1.0)
          throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                   ": probability outside [0,1]");
      }
      try {
        list.add(fields[0], fields.size() > 1 ? fields[1] : std::string{}, prob);
      } catch (const chem::ParseError& e) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                                 e.what());
      }
    }
    if (list.empty() && !allow_empty)
      throw std::runtime_error("hazard list is empty: " + path);
    return list;
  }

private:
  std::string name_;
  std::vector<HazardEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace larc::toolbox
