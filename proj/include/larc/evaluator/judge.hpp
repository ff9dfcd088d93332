// Judges grade one reaction at a time against the active constraint. The
// rule judge runs the canonical plan through the toolbox deterministically;
// evaluate_reaction wraps any judge with caching and the evaluation budget.
#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "larc/config.hpp"
#include "larc/evaluator/cache.hpp"
#include "larc/evaluator/constraint.hpp"
#include "larc/evaluator/plan.hpp"
#include "larc/evaluator/score.hpp"
#include "larc/synthesizer/reaction.hpp"
#include "larc/toolbox/tools.hpp"

namespace larc::evaluator {

struct JudgeVerdict {
  int raw = 5;
  std::string transcript;
  bool fallback = false;
};

class Judge {
public:
  virtual ~Judge() = default;
  virtual EvaluationPlan plan(const Constraint& c) = 0;
  virtual JudgeVerdict evaluate(const synthesizer::Reaction& r,
                                const EvaluationPlan& plan) = 0;
  virtual std::string_view mode() const = 0;
};

// Deterministic judge: executes the rule plan via the toolbox and applies the
// threshold rubric to the worst per-molecule value.
class RuleJudge : public Judge {
public:
  explicit RuleJudge(toolbox::ToolRegistry env) : env_(std::move(env)) {}

  EvaluationPlan plan(const Constraint& c) override { return rule_plan(c); }

  JudgeVerdict evaluate(const synthesizer::Reaction& r,
                        const EvaluationPlan& plan) override {
    std::vector<std::string> molecules;
    for (const auto& m : r.molecules()) molecules.push_back(m.text);

    std::string transcript = "reaction: " + r.key() + "\n";
    double worst = 0.0;
    for (const auto& step : plan.steps) {
      toolbox::ToolCall call;
      call.name = step.tool;
      if (step.tool == toolbox::ToolName::Identify) {
        for (const auto& m : molecules) {
          auto result = toolbox::execute(
              {toolbox::ToolName::Identify, {m, plan.constraint.payload->text}},
              env_);
          transcript += result.rendered + "\n";
          for (const auto& item : result.items) {
            if (!item.ok()) throw toolbox::ToolError(item.error);
            if (item.matched.value_or(false)) worst = 1.0;
          }
        }
        continue;
      }
      call.args = molecules;
      auto result = toolbox::execute(call, env_);
      transcript += result.rendered + "\n";
      for (const auto& item : result.items) {
        if (!item.ok()) throw toolbox::ToolError(item.error);
        if (item.value) worst = std::max(worst, *item.value);
      }
    }
    JudgeVerdict verdict;
    verdict.raw = rule_score_from_value(plan.kind, worst);
    transcript += "Answer: " + std::to_string(verdict.raw);
    verdict.transcript = std::move(transcript);
    return verdict;
  }

  std::string_view mode() const override { return "rule"; }

private:
  toolbox::ToolRegistry env_;
};

// Test and ablation judge: always returns the same raw score.
class FixedJudge : public Judge {
public:
  explicit FixedJudge(int raw) : raw_(raw) {}

  EvaluationPlan plan(const Constraint& c) override {
    auto p = rule_plan(c);
    p.instructions = "fixed score " + std::to_string(raw_);
    return p;
  }

  JudgeVerdict evaluate(const synthesizer::Reaction&,
                        const EvaluationPlan&) override {
    return JudgeVerdict{raw_, "Answer: " + std::to_string(raw_), false};
  }

  std::string_view mode() const override { return "fixed"; }

private:
  int raw_;
};

// Cache-and-budget wrapper around a judge. A cache hit never re-invokes the
// judge; once the budget is spent every new reaction gets the optimistic
// default score with provenance "default".
inline ReactionScore evaluate_reaction(const synthesizer::Reaction& r,
                                       const EvaluationPlan& plan,
                                       EvaluationCache& cache,
                                       const PlannerConfig& cfg, Judge& judge) {
  const std::string key = EvaluationCache::key(r, plan.constraint);
  if (auto hit = cache.find(key)) return *hit;
  if (!cache.try_consume_budget(cfg.n_eval)) {
    return cache.store(
        key, ReactionScore::make(cfg.default_score, ScoreProvenance::Default,
                                 "budget exhausted"));
  }
  const JudgeVerdict verdict = judge.evaluate(r, plan);
  return cache.store(key, ReactionScore::make(verdict.raw,
                                              verdict.fallback
                                                  ? ScoreProvenance::Fallback
                                                  : ScoreProvenance::Evaluated,
                                              verdict.transcript));
}

}  // namespace larc::evaluator
