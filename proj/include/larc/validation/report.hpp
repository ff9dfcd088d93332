// Route validation: the six per-route criteria and the aggregate presence /
// validity / success rates. Everything here re-derives its verdicts from the
// route text, stock and hazard files, independent of planner internals.
#pragma once

#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "larc/chem/canonical.hpp"
#include "larc/evaluator/constraint.hpp"
#include "larc/synthesizer/reaction.hpp"
#include "larc/toolbox/hazard_list.hpp"

namespace larc::validation {

// A route as plain text, the way it arrives from files or the planner.
struct RawReaction {
  std::vector<std::string> reactants;
  std::string product;
};

struct HazardTruth {
  const toolbox::HazardList* carcinogens = nullptr;
  const toolbox::HazardList* pyrophorics = nullptr;
};

struct RouteReport {
  std::string task_id;
  bool presence = false;
  bool connectivity = false;
  bool reachability = false;
  bool availability = false;
  bool molecule_validity = false;
  bool constraint_ok = false;
  std::size_t length = 0;
  double seconds = 0.0;
  int evaluations = 0;
  std::vector<std::string> diagnostics;

  bool valid() const {
    return presence && connectivity && reachability && availability &&
           molecule_validity;
  }
  bool success() const { return valid() && constraint_ok; }
};

namespace detail {

inline bool in_truth_set(const evaluator::Constraint& c,
                         const HazardTruth& truth,
                         const chem::CanonicalSmiles& m) {
  switch (c.kind) {
    case evaluator::ConstraintKind::AvoidCarcinogens:
      return truth.carcinogens && truth.carcinogens->contains(m);
    case evaluator::ConstraintKind::AvoidPyrophorics:
      return truth.pyrophorics && truth.pyrophorics->contains(m);
    case evaluator::ConstraintKind::AvoidSubstance:
      return c.payload && *c.payload == m;
  }
  return false;
}

}  // namespace detail

inline RouteReport check_route(const std::vector<RawReaction>& route,
                               const std::string& target,
                               const synthesizer::Stock& stock,
                               const evaluator::Constraint& constraint,
                               const HazardTruth& truth) {
  RouteReport report;
  report.length = route.size();
  report.presence = !route.empty();
  if (!report.presence) {
    report.diagnostics.push_back("route is empty");
    return report;
  }

  // Criterion 5 first: all SMILES must parse; later criteria work on
  // canonical forms.
  bool all_parse = true;
  std::vector<std::vector<chem::CanonicalSmiles>> reactants(route.size());
  std::vector<std::optional<chem::CanonicalSmiles>> products(route.size());
  for (std::size_t i = 0; i < route.size(); ++i) {
    try {
      products[i] = chem::canonicalize(route[i].product);
    } catch (const chem::ParseError& e) {
      all_parse = false;
      report.diagnostics.push_back("reaction " + std::to_string(i) +
                                   " product: " + e.what());
    }
    for (const auto& r : route[i].reactants) {
      try {
        reactants[i].push_back(chem::canonicalize(r));
      } catch (const chem::ParseError& e) {
        all_parse = false;
        report.diagnostics.push_back("reaction " + std::to_string(i) +
                                     " reactant: " + e.what());
      }
    }
    if (route[i].reactants.empty()) {
      all_parse = false;
      report.diagnostics.push_back("reaction " + std::to_string(i) +
                                   " has no reactants");
    }
  }
  report.molecule_validity = all_parse;
  if (!all_parse) return report;

  chem::CanonicalSmiles canonical_target;
  try {
    canonical_target = chem::canonicalize(target);
  } catch (const chem::ParseError& e) {
    report.diagnostics.push_back(std::string("target: ") + e.what());
    return report;
  }

  // Producer map; a molecule made by two different reactions breaks
  // connectivity.
  std::unordered_map<std::string, std::size_t> producer;
  bool unique_producers = true;
  for (std::size_t i = 0; i < route.size(); ++i) {
    auto [it, inserted] = producer.emplace(products[i]->text, i);
    if (!inserted) {
      unique_producers = false;
      report.diagnostics.push_back("molecule produced twice: " +
                                   products[i]->text);
    }
  }

  // Criterion 3: some reaction yields the target.
  report.reachability = producer.count(canonical_target.text) > 0;

  // Acyclicity over product -> reactant dependencies.
  // state: 0 unvisited, 1 on stack, 2 done.
  std::unordered_map<std::string, int> state;
  bool acyclic = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  auto visit = [&](std::size_t root_rxn) {
    stack.clear();
    stack.emplace_back(root_rxn, 0);
    state[products[root_rxn]->text] = 1;
    while (!stack.empty()) {
      auto& [rxn, next] = stack.back();
      if (next >= reactants[rxn].size()) {
        state[products[rxn]->text] = 2;
        stack.pop_back();
        continue;
      }
      const auto& dep = reactants[rxn][next++];
      auto prod_it = producer.find(dep.text);
      if (prod_it == producer.end()) continue;
      const int dep_state = state.count(dep.text) ? state[dep.text] : 0;
      if (dep_state == 1) {
        acyclic = false;
        report.diagnostics.push_back("cycle through " + dep.text);
        return;
      }
      if (dep_state == 0) {
        state[dep.text] = 1;
        stack.emplace_back(prod_it->second, 0);
      }
    }
  };
  for (std::size_t i = 0; i < route.size() && acyclic; ++i) {
    const int s = state.count(products[i]->text) ? state[products[i]->text] : 0;
    if (s == 0) visit(i);
  }

  // Every reaction must feed the target or another reaction.
  bool all_connected = true;
  std::unordered_set<std::string> consumed;
  for (const auto& rs : reactants)
    for (const auto& r : rs) consumed.insert(r.text);
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (*products[i] == canonical_target) continue;
    if (!consumed.count(products[i]->text)) {
      all_connected = false;
      report.diagnostics.push_back("dangling product: " + products[i]->text);
    }
  }
  report.connectivity = unique_producers && acyclic && all_connected;

  // Criterion 4: every leaf reactant is purchasable.
  report.availability = true;
  for (std::size_t i = 0; i < route.size(); ++i) {
    for (const auto& r : reactants[i]) {
      if (producer.count(r.text)) continue;  // intermediate
      if (!stock.contains(r)) {
        report.availability = false;
        report.diagnostics.push_back("leaf not in stock: " + r.text);
      }
    }
  }

  // Criterion 6 against ground truth, over every molecule in the route:
  // reactants, intermediates and the target alike.
  report.constraint_ok = true;
  std::set<std::string> molecules;
  molecules.insert(canonical_target.text);
  for (std::size_t i = 0; i < route.size(); ++i) {
    molecules.insert(products[i]->text);
    for (const auto& r : reactants[i]) molecules.insert(r.text);
  }
  for (const auto& text : molecules) {
    if (detail::in_truth_set(constraint, truth, chem::CanonicalSmiles(text))) {
      report.constraint_ok = false;
      report.diagnostics.push_back("hazardous molecule in route: " + text);
    }
  }
  return report;
}

struct Metrics {
  int n_total = 0;
  int n_present = 0;
  int n_valid = 0;
  int n_success = 0;

  double presence_rate() const { return 100.0 * n_present / n_total; }
  double validity_rate() const { return 100.0 * n_valid / n_total; }
  double success_rate() const { return 100.0 * n_success / n_total; }
};

inline Metrics aggregate_metrics(const std::vector<RouteReport>& reports) {
  if (reports.empty())
    throw std::invalid_argument("no reports to aggregate");
  Metrics m;
  m.n_total = static_cast<int>(reports.size());
  for (const auto& r : reports) {
    if (r.presence) ++m.n_present;
    if (r.valid()) ++m.n_valid;
    if (r.success()) ++m.n_success;
  }
  return m;
}

// Display form: one decimal, e.g. 89.6.
inline std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", rate);
  return buf;
}

}  // namespace larc::validation
