// Evaluation cache: one stored score per (reaction key, constraint
// fingerprint); re-queries never re-invoke the judge. Concurrent readers,
// serialized writers, atomic budget counting.
#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "larc/evaluator/constraint.hpp"
#include "larc/evaluator/score.hpp"
#include "larc/synthesizer/reaction.hpp"

namespace larc::evaluator {

class EvaluationCache {
public:
  static std::string key(const synthesizer::Reaction& r, const Constraint& c) {
    return r.key() + "|" + c.fingerprint();
  }

  std::optional<ReactionScore> find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // First writer wins; the stored entry is returned either way.
  ReactionScore store(const std::string& key, ReactionScore score) {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = entries_.emplace(key, std::move(score));
    return it->second;
  }

  int invocations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return invocations_;
  }

  // Consumes one unit of the judge budget unless `limit` is exhausted.
  bool try_consume_budget(int limit) {
    std::lock_guard<std::mutex> lock(mu_);
    if (invocations_ >= limit) return false;
    ++invocations_;
    return true;
  }

  // Batch runs share score entries across tasks but budget each task anew.
  void reset_invocations() {
    std::lock_guard<std::mutex> lock(mu_);
    invocations_ = 0;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
  }

  std::unordered_map<std::string, ReactionScore> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_;
  }

private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, ReactionScore> entries_;
  int invocations_ = 0;
};

}  // namespace larc::evaluator
