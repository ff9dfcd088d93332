// Engine-wide planner configuration. Defaults match the published search
// settings: lambda 2, K 5, 500 expansions, 300 evaluations, UCB scale 4,
// optimistic default score 5.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace larc {

struct PlannerConfig {
  double lambda = 2.0;        // constraint weight, >= 0
  int k = 5;                  // simulations per iteration, >= 1
  int n_exp = 500;            // expansion limit
  int n_eval = 300;           // judge invocation limit
  double ucb_scale = 4.0;     // exploration constant
  int default_score = 5;      // raw score for unevaluated reactions
  std::uint64_t seed = 0;
  std::string value_backend = "default";
  std::string expansion_backend = "db";

  void validate() const {
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (n_exp < 0 || n_eval < 0)
      throw std::invalid_argument("budgets must be >= 0");
    if (default_score < 1 || default_score > 5)
      throw std::invalid_argument("default score must be in [1,5]");
  }
};

}  // namespace larc
