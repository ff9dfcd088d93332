// Value functions: the constraint-aware combination V' = V + lambda * sum of
// normalized reaction scores, min-max normalization, and the pluggable base
// heuristics standing in for pre-trained value networks.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "larc/evaluator/score.hpp"

namespace larc::synthesizer {

// V'(m, R) = V(m, R) + lambda * sum of s(r) with s already in [0,1].
inline double constrained_value(double base, double lambda,
                                double score_sum_normalized) {
  return base + lambda * score_sum_normalized;
}

// Same, from raw 1-5 scores.
inline double value_mcts(double base, double lambda,
                         const std::vector<int>& raw_scores) {
  double sum = 0;
  for (int raw : raw_scores) sum += evaluator::normalize_score(raw);
  return constrained_value(base, lambda, sum);
}

// Rescales to [0,1]; a degenerate range (all equal) maps everything to 0 so
// ranking falls entirely to the constraint term.
inline std::vector<double> min_max_normalize(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - lo) / (hi - lo);
  return out;
}

// UCB exploration bonus; +1 smoothing keeps it finite at zero counts.
inline double ucb_bonus(double scale, int parent_visits, int edge_selections) {
  return scale * std::sqrt(std::log(static_cast<double>(parent_visits) + 1.0) /
                           (static_cast<double>(edge_selections) + 1.0));
}

// Base heuristics over (molecule, partial route). Stand-ins for the trained
// networks of full-scale planners; swappable behind this interface.
class ValueBackend {
public:
  virtual ~ValueBackend() = default;
  virtual double v_mcts(bool in_stock, int atom_count,
                        std::size_t route_len) const = 0;
  virtual double v_astar(bool in_stock, int atom_count,
                         std::size_t route_len) const = 0;
};

// Favors short routes that end in stock; cheap and admissible-flavored.
class DefaultValueBackend : public ValueBackend {
public:
  double v_mcts(bool in_stock, int atom_count,
                std::size_t route_len) const override {
    if (in_stock) return 1.0;
    return -0.05 * atom_count - 0.1 * static_cast<double>(route_len);
  }
  double v_astar(bool in_stock, int atom_count,
                 std::size_t route_len) const override {
    const double h = in_stock ? 0.0 : 1.0 + atom_count / 20.0;
    return -(static_cast<double>(route_len) + h);
  }
};

inline std::unique_ptr<ValueBackend> make_value_backend(const std::string& id) {
  if (id == "default") return std::make_unique<DefaultValueBackend>();
  throw std::invalid_argument("unknown value backend: " + id);
}

}  // namespace larc::synthesizer
