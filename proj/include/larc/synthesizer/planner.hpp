// Constrained route search: MCTS simulation proposes K candidate partial
// routes, all candidate reactions get judged (budget permitting), an A*-style
// selection picks one candidate, and its frontier is expanded through the
// reaction database. Repeats until a complete route is found or the
// expansion budget runs out.
#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "larc/config.hpp"
#include "larc/evaluator/cache.hpp"
#include "larc/evaluator/judge.hpp"
#include "larc/synthesizer/reaction.hpp"
#include "larc/synthesizer/search_tree.hpp"
#include "larc/synthesizer/value.hpp"

namespace larc::synthesizer {

struct Candidate {
  SearchTree::NodeId frontier = -1;
  std::vector<SearchTree::EdgeId> edges;  // root-first
};

// Normalized score for a reaction, default-optimistic when unevaluated.
using ScoreFn = std::function<double(const Reaction&)>;

// Queries the database for retro reactions producing `m` and inserts the
// novel ones. Re-expansion returns empty and leaves the tree unchanged.
inline std::vector<SearchTree::EdgeId> expand(SearchTree& tree,
                                              SearchTree::NodeId m,
                                              const ReactionDb& db) {
  if (tree.node(m).in_stock)
    throw std::logic_error("expanding a stock molecule");
  if (tree.node(m).expanded) return {};
  tree.node(m).expanded = true;
  const chem::CanonicalSmiles smiles = tree.node(m).smiles;
  std::vector<SearchTree::EdgeId> inserted;
  for (const Reaction* r : db.producing(smiles)) {
    const auto e = tree.insert_reaction(*r);
    if (e >= 0) inserted.push_back(e);
  }
  if (tree.node(m).producing.empty()) tree.node(m).dead = true;
  return inserted;
}

// One simulation pass per Algorithm 2: greedy descent by the constraint-aware
// MCTS value, updating visit and selection counts once per step.
inline std::vector<Candidate> simulate_mcts(SearchTree& tree,
                                            const ScoreFn& score,
                                            const PlannerConfig& cfg,
                                            const ValueBackend& values) {
  std::vector<Candidate> out;
  std::unordered_set<int> seen_frontiers;
  const int depth_cap = tree.node_count() + tree.edge_count() + 8;
  for (int k = 0; k < cfg.k; ++k) {
    SearchTree::NodeId m = tree.root();
    std::vector<SearchTree::EdgeId> route;
    double score_sum = 0.0;
    while (static_cast<int>(route.size()) <= depth_cap) {
      const auto& producing = tree.node(m).producing;
      if (producing.empty()) break;

      struct Alt {
        SearchTree::EdgeId e;
        SearchTree::NodeId next;
      };
      std::vector<Alt> alts;
      std::vector<double> bases;
      for (const auto e : producing) {
        // The frontier is the deepest unresolved intermediate, so descent
        // prefers reactants outside stock; an edge resolved entirely from
        // stock keeps them all (terminal step).
        bool has_open = false;
        for (const auto next : tree.edge(e).reactants)
          has_open |= !tree.node(next).in_stock;
        for (const auto next : tree.edge(e).reactants) {
          if (has_open && tree.node(next).in_stock) continue;
          alts.push_back({e, next});
          const auto& n = tree.node(next);
          bases.push_back(values.v_mcts(n.in_stock, n.atom_count,
                                        route.size() + 1));
        }
      }
      const auto scaled = min_max_normalize(bases);
      int best = 0;
      double best_v = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < alts.size(); ++i) {
        const double edge_score = score(tree.edge(alts[i].e).reaction);
        const double v =
            scaled[i] +
            ucb_bonus(cfg.ucb_scale, tree.node(m).visits,
                      tree.edge(alts[i].e).selections) +
            cfg.lambda * (score_sum + edge_score);
        if (v > best_v) {
          best_v = v;
          best = static_cast<int>(i);
        }
      }
      tree.node(m).visits += 1;
      tree.edge(alts[best].e).selections += 1;
      score_sum += score(tree.edge(alts[best].e).reaction);
      route.push_back(alts[best].e);
      m = alts[best].next;
    }
    if (seen_frontiers.insert(m).second) out.push_back(Candidate{m, route});
  }
  return out;
}

struct SelectionReport {
  std::size_t selected = 0;
  std::vector<double> v_scaled;         // min-max normalized base values
  std::vector<double> constraint_term;  // lambda * sum of normalized scores
  std::vector<double> v_prime;
};

// Algorithm 3: min-max the base A* values across candidates, add the
// weighted constraint term, argmax with earliest-candidate tie-breaking.
inline SelectionReport select_astar(const SearchTree& tree,
                                    const std::vector<Candidate>& candidates,
                                    const ScoreFn& score,
                                    const PlannerConfig& cfg,
                                    const ValueBackend& values) {
  if (candidates.empty())
    throw std::invalid_argument("empty candidate set");
  SelectionReport report;
  std::vector<double> raw;
  raw.reserve(candidates.size());
  for (const auto& c : candidates) {
    const auto& n = tree.node(c.frontier);
    raw.push_back(values.v_astar(n.in_stock, n.atom_count, c.edges.size()));
  }
  report.v_scaled = min_max_normalize(raw);
  report.constraint_term.reserve(candidates.size());
  report.v_prime.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double sum = 0.0;
    for (const auto e : candidates[i].edges)
      sum += score(tree.edge(e).reaction);
    report.constraint_term.push_back(cfg.lambda * sum);
    report.v_prime.push_back(report.v_scaled[i] + report.constraint_term[i]);
  }
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (report.v_prime[i] > report.v_prime[report.selected])
      report.selected = i;
  return report;
}

// Reactants across the edge set that no edge produces, in scan order.
inline std::vector<SearchTree::NodeId> route_leaves(
    const SearchTree& tree, const std::vector<SearchTree::EdgeId>& edges) {
  std::unordered_set<int> produced;
  for (const auto e : edges) produced.insert(tree.edge(e).product);
  std::vector<SearchTree::NodeId> leaves;
  std::unordered_set<int> seen;
  for (const auto e : edges) {
    for (const auto r : tree.edge(e).reactants) {
      if (produced.count(r) || !seen.insert(r).second) continue;
      leaves.push_back(r);
    }
  }
  return leaves;
}

inline bool route_complete(const SearchTree& tree,
                           const std::vector<SearchTree::EdgeId>& edges) {
  if (edges.empty()) return false;
  for (const auto leaf : route_leaves(tree, edges))
    if (!tree.node(leaf).in_stock) return false;
  return true;
}

struct Route {
  chem::CanonicalSmiles target;
  std::vector<Reaction> reactions;               // root-first
  std::vector<evaluator::ReactionScore> scores;  // parallel to reactions
  std::vector<chem::CanonicalSmiles> leaves;
  std::size_t length() const { return reactions.size(); }
};

struct PlanStats {
  int iterations = 0;
  int expansions = 0;
  int judge_invocations = 0;
  bool trivial = false;          // target already purchasable
  bool solved_fallback = false;  // route recovered from the tree at loop end
  std::string failure_reason;    // set when no route was found
};

struct PlanResult {
  std::optional<Route> route;
  PlanStats stats;
  std::string decision_log;  // JSON lines, one record per iteration
};

class Planner {
public:
  Planner(const ReactionDb& db, const Stock& stock, PlannerConfig cfg,
          evaluator::Judge& judge, const ValueBackend& values,
          evaluator::EvaluationCache* shared_cache = nullptr)
      : db_(db),
        stock_(stock),
        cfg_(std::move(cfg)),
        judge_(judge),
        values_(values),
        cache_(shared_cache ? shared_cache : &own_cache_) {
    cfg_.validate();
    if (cfg_.expansion_backend != "db")
      throw std::invalid_argument("unknown expansion backend: " +
                                  cfg_.expansion_backend);
  }

  const evaluator::EvaluationCache& cache() const { return *cache_; }

  PlanResult plan(const chem::CanonicalSmiles& target,
                  const evaluator::Constraint& constraint) {
    constraint.validate();
    PlanResult result;
    std::ostringstream log;

    evaluator::EvaluationPlan eplan = judge_.plan(constraint);
    SearchTree tree(target, stock_);
    const int invocations_before = cache_->invocations();

    nlohmann::json header;
    header["target"] = target.text;
    header["constraint"] = constraint.fingerprint();
    header["lambda"] = cfg_.lambda;
    header["k"] = cfg_.k;
    header["n_exp"] = cfg_.n_exp;
    header["n_eval"] = cfg_.n_eval;
    header["ucb_scale"] = cfg_.ucb_scale;
    header["default_score"] = cfg_.default_score;
    header["seed"] = cfg_.seed;
    header["judge"] = std::string(judge_.mode());
    header["note"] = "visit counts persist across iterations";
    log << header.dump() << '\n';

    if (stock_.contains(target)) {
      result.route = Route{target, {}, {}, {target}};
      result.stats.trivial = true;
      result.decision_log = log.str();
      return result;
    }

    const ScoreFn score_of = [&](const Reaction& r) {
      if (auto hit = cache_->find(evaluator::EvaluationCache::key(r, constraint)))
        return hit->normalized;
      return evaluator::normalize_score(cfg_.default_score);
    };

    int n_exp = 0;
    while (n_exp < cfg_.n_exp && !result.route) {
      ++result.stats.iterations;
      auto candidates = simulate_mcts(tree, score_of, cfg_, values_);

      for (const auto& cand : candidates)
        for (const auto e : cand.edges)
          evaluator::evaluate_reaction(tree.edge(e).reaction, eplan, *cache_,
                                       cfg_, judge_);

      const auto selection =
          select_astar(tree, candidates, score_of, cfg_, values_);
      const Candidate& chosen = candidates[selection.selected];

      nlohmann::json entry;
      entry["iter"] = result.stats.iterations;
      auto& cands = entry["candidates"] = nlohmann::json::array();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        cands.push_back({{"frontier", tree.node(candidates[i].frontier).smiles.text},
                         {"len", candidates[i].edges.size()},
                         {"v", selection.v_scaled[i]},
                         {"constraint", selection.constraint_term[i]},
                         {"vprime", selection.v_prime[i]}});
      }
      entry["selected"] = selection.selected;

      if (route_complete(tree, chosen.edges)) {
        result.route = build_route(tree, chosen.edges, eplan);
        entry["complete"] = true;
        log << entry.dump() << '\n';
        break;
      }

      const auto target_node = pick_expansion_target(tree, chosen);
      if (target_node < 0) {
        result.stats.failure_reason = "no expandable molecules left";
        entry["exhausted"] = true;
        log << entry.dump() << '\n';
        break;
      }

      const auto inserted = expand(tree, target_node, db_);
      ++n_exp;

      for (const auto e : inserted) {
        auto extended = chosen.edges;
        extended.push_back(e);
        if (route_complete(tree, extended)) {
          result.route = build_route(tree, extended, eplan);
          break;
        }
      }

      // The expansion may have completed a route the selected chain cannot
      // express (side goals resolved out of order); recover it from the tree.
      if (!result.route && tree.target_solved()) {
        auto edges = extract_best_route(tree, eplan, constraint);
        if (!edges.empty()) {
          result.route = build_route(tree, edges, eplan);
          result.stats.solved_fallback = true;
        }
      }

      entry["expanded"] = tree.node(target_node).smiles.text;
      entry["new_reactions"] = inserted.size();
      entry["n_exp"] = n_exp;
      entry["n_eval"] = cache_->invocations() - invocations_before;
      entry["complete"] = result.route.has_value();
      log << entry.dump() << '\n';
    }
    if (!result.route && result.stats.failure_reason.empty())
      result.stats.failure_reason = n_exp >= cfg_.n_exp
                                        ? "expansion budget exhausted"
                                        : "no route found";

    result.stats.expansions = n_exp;
    result.stats.judge_invocations = cache_->invocations() - invocations_before;
    result.decision_log = log.str();
    return result;
  }

private:
  // Minimum-cost solved route where each reaction costs 1 plus
  // lambda * (1 - s(r)); at lambda 0 this is plain minimum size and entirely
  // judge-independent. Solved edges are evaluated first (budget permitting)
  // so cached violations actually steer the choice.
  std::vector<SearchTree::EdgeId> extract_best_route(
      SearchTree& tree, const evaluator::EvaluationPlan& eplan,
      const evaluator::Constraint& constraint) {
    std::function<double(const Reaction&)> penalty;
    if (cfg_.lambda > 0) {
      for (SearchTree::EdgeId e = 0; e < tree.edge_count(); ++e)
        if (tree.edge(e).solved)
          evaluator::evaluate_reaction(tree.edge(e).reaction, eplan, *cache_,
                                       cfg_, judge_);
      penalty = [this, &constraint](const Reaction& r) {
        double s = evaluator::normalize_score(cfg_.default_score);
        if (auto hit =
                cache_->find(evaluator::EvaluationCache::key(r, constraint)))
          s = hit->normalized;
        return cfg_.lambda * (1.0 - s);
      };
    }
    return tree.extract_route(tree.root(), penalty);
  }

  SearchTree::NodeId pick_expansion_target(const SearchTree& tree,
                                           const Candidate& chosen) const {
    const auto expandable = [&](SearchTree::NodeId n) {
      return !tree.node(n).in_stock && !tree.node(n).expanded;
    };
    if (expandable(chosen.frontier)) return chosen.frontier;
    // Open side-goals of the chosen route come next, then any open molecule
    // in insertion order, so every iteration makes progress when possible.
    for (const auto e : chosen.edges)
      for (const auto r : tree.edge(e).reactants)
        if (expandable(r)) return r;
    for (const auto n : tree.open_nodes()) return n;
    return -1;
  }

  Route build_route(SearchTree& tree,
                    const std::vector<SearchTree::EdgeId>& edges,
                    const evaluator::EvaluationPlan& eplan) {
    Route route;
    route.target = tree.node(tree.root()).smiles;
    for (const auto e : edges) {
      route.reactions.push_back(tree.edge(e).reaction);
      route.scores.push_back(evaluator::evaluate_reaction(
          tree.edge(e).reaction, eplan, *cache_, cfg_, judge_));
    }
    for (const auto leaf : route_leaves(tree, edges))
      route.leaves.push_back(tree.node(leaf).smiles);
    return route;
  }

  const ReactionDb& db_;
  const Stock& stock_;
  PlannerConfig cfg_;
  evaluator::Judge& judge_;
  const ValueBackend& values_;
  evaluator::EvaluationCache own_cache_;
  evaluator::EvaluationCache* cache_;
};

}  // namespace larc::synthesizer
