// Search tree over molecules and retro reactions: molecule nodes with visit
// counts, reaction edges (product -> reactants) with selection counts, and
// solved-flag propagation from stock upward.
#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "larc/chem/smiles.hpp"
#include "larc/synthesizer/reaction.hpp"

namespace larc::synthesizer {

class SearchTree {
public:
  using NodeId = int;
  using EdgeId = int;

  struct MolNode {
    chem::CanonicalSmiles smiles;
    int atom_count = 0;
    bool in_stock = false;
    bool expanded = false;
    bool dead = false;    // expanded, nothing produces it
    bool solved = false;  // completable from stock within the tree
    int visits = 0;
    std::vector<EdgeId> producing;  // edges whose product is this node
    std::vector<EdgeId> consuming;  // edges using this node as a reactant
  };

  struct ReactionEdge {
    Reaction reaction;
    NodeId product = -1;
    std::vector<NodeId> reactants;  // lexicographic by canonical text
    int selections = 0;
    bool solved = false;
  };

  SearchTree(const chem::CanonicalSmiles& target, const Stock& stock)
      : stock_(&stock) {
    root_ = ensure_node(target);
  }

  NodeId root() const { return root_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const MolNode& node(NodeId id) const { return nodes_.at(id); }
  MolNode& node(NodeId id) { return nodes_.at(id); }
  const ReactionEdge& edge(EdgeId id) const { return edges_.at(id); }
  ReactionEdge& edge(EdgeId id) { return edges_.at(id); }

  NodeId find(const chem::CanonicalSmiles& m) const {
    auto it = by_smiles_.find(m.text);
    return it == by_smiles_.end() ? -1 : it->second;
  }

  NodeId ensure_node(const chem::CanonicalSmiles& m) {
    auto it = by_smiles_.find(m.text);
    if (it != by_smiles_.end()) return it->second;
    MolNode n;
    n.smiles = m;
    n.in_stock = stock_->contains(m);
    n.solved = n.in_stock;
    int atoms = 0;
    for (const auto& frag : chem::parse_smiles(m.text)) atoms += frag.atom_count();
    n.atom_count = atoms;
    const NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(n));
    by_smiles_.emplace(m.text, id);
    insertion_order_.push_back(id);
    return id;
  }

  // Inserts a retro reaction as an edge under its product node; duplicate
  // reactions (by key) are ignored. Returns the edge id or -1.
  EdgeId insert_reaction(const Reaction& r) {
    const std::string key = r.key();
    if (edge_keys_.count(key)) return -1;
    edge_keys_.insert(key);
    ReactionEdge e;
    e.reaction = r;
    e.product = ensure_node(r.product);
    auto sorted = r.reactants;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& m : sorted) e.reactants.push_back(ensure_node(m));
    const EdgeId id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(std::move(e));
    nodes_[edges_[id].product].producing.push_back(id);
    for (NodeId n : edges_[id].reactants) nodes_[n].consuming.push_back(id);
    update_edge_solved(id);
    return id;
  }

  // Nodes in insertion order that are candidates for expansion.
  std::vector<NodeId> open_nodes() const {
    std::vector<NodeId> out;
    for (NodeId id : insertion_order_) {
      const MolNode& n = nodes_[id];
      if (!n.in_stock && !n.expanded) out.push_back(id);
    }
    return out;
  }

  bool target_solved() const { return nodes_[root_].solved; }

  // Minimum-cost complete route for a solved node: fixpoint relaxation over
  // solved edges, ties broken by reaction key. Each edge costs 1 plus
  // whatever `edge_penalty` adds (0 for plain minimum size).
  std::vector<EdgeId> extract_route(
      NodeId target,
      const std::function<double(const Reaction&)>& edge_penalty = {}) const {
    if (!nodes_[target].solved) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(nodes_.size(), kInf);
    std::vector<EdgeId> choice(nodes_.size(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].in_stock) cost[i] = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (EdgeId e = 0; e < edge_count(); ++e) {
        const ReactionEdge& edge = edges_[e];
        if (!edge.solved) continue;
        double total = 1 + (edge_penalty ? edge_penalty(edge.reaction) : 0.0);
        for (NodeId r : edge.reactants) {
          if (cost[r] == kInf) {
            total = kInf;
            break;
          }
          total += cost[r];
        }
        if (total == kInf) continue;
        const NodeId p = edge.product;
        const bool better = total < cost[p];
        const bool tie_better =
            total == cost[p] && choice[p] >= 0 && choice[p] != e &&
            edge.reaction.key() < edges_[choice[p]].reaction.key();
        if (better || tie_better) {
          cost[p] = total;
          choice[p] = e;
          changed = true;
        }
      }
    }
    std::vector<EdgeId> route;
    std::vector<char> resolved(nodes_.size(), 0);
    std::vector<NodeId> stack{target};
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      if (nodes_[n].in_stock || resolved[n]) continue;
      resolved[n] = 1;
      const EdgeId e = choice[n];
      if (e < 0) return {};  // should not happen for solved targets
      route.push_back(e);
      for (NodeId r : edges_[e].reactants) stack.push_back(r);
    }
    return route;
  }

private:
  void update_edge_solved(EdgeId id) {
    ReactionEdge& e = edges_[id];
    for (NodeId r : e.reactants)
      if (!nodes_[r].solved) return;
    e.solved = true;
    propagate_solved(e.product);
  }

  void propagate_solved(NodeId start) {
    if (nodes_[start].solved) return;
    std::vector<NodeId> queue{start};
    nodes_[start].solved = true;
    while (!queue.empty()) {
      const NodeId n = queue.back();
      queue.pop_back();
      for (EdgeId e : nodes_[n].consuming) {
        ReactionEdge& edge = edges_[e];
        if (edge.solved) continue;
        bool all = true;
        for (NodeId r : edge.reactants)
          if (!nodes_[r].solved) {
            all = false;
            break;
          }
        if (!all) continue;
        edge.solved = true;
        if (!nodes_[edge.product].solved) {
          nodes_[edge.product].solved = true;
          queue.push_back(edge.product);
        }
      }
    }
  }

  const Stock* stock_;
  NodeId root_ = -1;
  std::vector<MolNode> nodes_;
  std::vector<ReactionEdge> edges_;
  std::unordered_map<std::string, NodeId> by_smiles_;
  std::unordered_set<std::string> edge_keys_;
  std::vector<NodeId> insertion_order_;
};

}  // namespace larc::synthesizer
