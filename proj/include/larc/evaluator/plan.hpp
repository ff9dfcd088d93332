// Evaluation plans: the per-task tool sequence and scoring rubric, generated
// once and followed for every reaction evaluation.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "larc/evaluator/constraint.hpp"
#include "larc/toolbox/action.hpp"

namespace larc::evaluator {

struct PlanStep {
  toolbox::ToolName tool;
  std::string argument_hint;  // description of the inputs, not concrete values
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct EvaluationPlan {
  ConstraintKind kind = ConstraintKind::AvoidCarcinogens;
  Constraint constraint;
  std::vector<PlanStep> steps;                         // at least one
  std::vector<std::pair<int, std::string>> rubric;     // covers scores 1 and 5
  std::string instructions;   // evaluation instructions (LLM mode, verbatim)
  std::string transcript;     // raw planning transcript (LLM mode)
  std::vector<ChatMessage> context;  // planning exchange reused per evaluation

  void validate() const {
    if (steps.empty()) throw std::invalid_argument("evaluation plan has no steps");
    bool has1 = false, has5 = false;
    for (const auto& [score, text] : rubric) {
      if (score == 1) has1 = true;
      if (score == 5) has5 = true;
    }
    if (!has1 || !has5)
      throw std::invalid_argument("rubric must cover scores 1 and 5");
  }
};

// Scoring thresholds applied by the rule judge to the worst (maximum) tool
// value seen across the reaction's molecules.
inline int rule_score_from_value(ConstraintKind kind, double max_value) {
  switch (kind) {
    case ConstraintKind::AvoidCarcinogens:
      if (max_value >= 0.9) return 1;
      if (max_value >= 0.7) return 2;
      if (max_value >= 0.5) return 3;
      if (max_value >= 0.3) return 4;
      return 5;
    case ConstraintKind::AvoidPyrophorics:
      if (max_value >= 1.0) return 1;
      if (max_value >= 0.8) return 2;
      if (max_value >= 0.6) return 3;
      if (max_value >= 0.4) return 4;
      return 5;
    case ConstraintKind::AvoidSubstance:
      return max_value >= 1.0 ? 1 : 5;
  }
  return 5;
}

// Canonical rule-mode plan for each constraint kind.
inline EvaluationPlan rule_plan(const Constraint& c) {
  c.validate();
  EvaluationPlan plan;
  plan.kind = c.kind;
  plan.constraint = c;
  switch (c.kind) {
    case ConstraintKind::AvoidCarcinogens:
      plan.steps = {{toolbox::ToolName::Carcinogenicity,
                     "all reactant and product SMILES of the reaction"}};
      plan.rubric = {{1, "max carcinogenicity probability >= 0.9"},
                     {2, "max probability >= 0.7"},
                     {3, "max probability >= 0.5"},
                     {4, "max probability >= 0.3"},
                     {5, "max probability < 0.3"}};
      break;
    case ConstraintKind::AvoidPyrophorics:
      plan.steps = {{toolbox::ToolName::Pyrophoricity,
                     "all reactant and product SMILES of the reaction"}};
      plan.rubric = {{1, "max similarity to the pyrophoric list = 1.0"},
                     {2, "max similarity >= 0.8"},
                     {3, "max similarity >= 0.6"},
                     {4, "max similarity >= 0.4"},
                     {5, "max similarity < 0.4"}};
      break;
    case ConstraintKind::AvoidSubstance:
      plan.steps = {{toolbox::ToolName::Identify,
                     "each reaction molecule against `" + c.payload->text + "`"}};
      plan.rubric = {{1, "the avoided substance appears in the reaction"},
                     {5, "the avoided substance does not appear"}};
      break;
  }
  plan.validate();
  return plan;
}

}  // namespace larc::evaluator
