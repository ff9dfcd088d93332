#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "larc/evaluator/cache.hpp"
#include "larc/evaluator/judge.hpp"
#include "larc/evaluator/llm_judge.hpp"
#include "larc/evaluator/plan.hpp"
#include "larc/evaluator/score.hpp"
#include "larc/synthesizer/reaction.hpp"

using namespace larc;
using namespace larc::evaluator;
using larc::synthesizer::make_reaction;
using larc::synthesizer::Reaction;

namespace {

struct RuleWorld {
  toolbox::HazardList carcinogens{"carcinogens"};
  toolbox::HazardList pyrophorics{"pyrophorics"};
  std::unique_ptr<toolbox::LookupCarcinogenBackend> backend;
  toolbox::ToolRegistry env;

  RuleWorld() {
    carcinogens.add("c1ccccc1", "benzene");
    carcinogens.add("C=O", "formaldehyde");
    pyrophorics.add("CC(C)(C)[Li]");
    pyrophorics.add("CC[Zn]CC");
    backend = std::make_unique<toolbox::LookupCarcinogenBackend>(&carcinogens);
    env.carcinogens = backend.get();
    env.pyrophorics = &pyrophorics;
  }
};

}  // namespace

TEST_CASE("score normalization") {
  CHECK(normalize_score(1) == 0.0);
  CHECK(normalize_score(3) == 0.5);
  CHECK(normalize_score(5) == 1.0);
  CHECK(normalize_score(2) == 0.25);
  CHECK(normalize_score(4) == 0.75);
  CHECK_THROWS_AS(normalize_score(0), std::out_of_range);
  CHECK_THROWS_AS(normalize_score(6), std::out_of_range);
  for (int raw = 2; raw <= 5; ++raw)
    CHECK(normalize_score(raw) > normalize_score(raw - 1));
}

TEST_CASE("final score parsing") {
  CHECK(parse_final_score("Reasoning: looks fine\nAnswer: 4") == 4);
  CHECK(parse_final_score("```Answer(3)```") == 3);
  CHECK(parse_final_score("Answer: 2\n...more...\nAnswer: 5") == 5);
  CHECK(parse_final_score("Answer(1)\nAnswer: 3") == 3);
  std::string diag;
  CHECK(parse_final_score("Answer: 9", &diag) == 5);
  CHECK(diag.find("clamped") != std::string::npos);
  diag.clear();
  CHECK(parse_final_score("Answer(0)", &diag) == 1);
  CHECK_FALSE(diag.empty());
  CHECK(parse_final_score("Answer ( 2 )") == 2);
  CHECK_THROWS_AS(parse_final_score("no verdict here"), ScoreParseError);
  CHECK_THROWS_AS(parse_final_score("Answer: none"), ScoreParseError);
}

TEST_CASE("rule plans per constraint kind") {
  auto substance = rule_plan(Constraint::avoid_substance("O=C(Cl)Cl"));
  REQUIRE(substance.steps.size() == 1);
  CHECK(substance.steps[0].tool == toolbox::ToolName::Identify);
  bool has1 = false, has5 = false;
  for (auto& [s, t] : substance.rubric) {
    has1 |= s == 1;
    has5 |= s == 5;
  }
  CHECK(has1);
  CHECK(has5);

  auto carc = rule_plan(Constraint::avoid_carcinogens());
  CHECK(carc.steps[0].tool == toolbox::ToolName::Carcinogenicity);

  auto pyro = rule_plan(Constraint::avoid_pyrophorics());
  CHECK(pyro.steps[0].tool == toolbox::ToolName::Pyrophoricity);

  CHECK_THROWS(rule_plan(Constraint{ConstraintKind::AvoidSubstance, {}, {}}));
}

TEST_CASE("rule judge scores reactions against the constraint") {
  RuleWorld world;
  RuleJudge judge(world.env);

  SECTION("substance identity is binary") {
    auto plan = judge.plan(Constraint::avoid_substance("O=C(Cl)Cl"));
    auto hit = judge.evaluate(
        make_reaction("r1", {"O=C(Cl)Cl", "CCO"}, "CCOC(=O)OCC"), plan);
    CHECK(hit.raw == 1);
    auto miss = judge.evaluate(make_reaction("r2", {"CCO", "CC"}, "CCOCC"), plan);
    CHECK(miss.raw == 5);
  }
  SECTION("carcinogen lookup thresholds") {
    auto plan = judge.plan(Constraint::avoid_carcinogens());
    auto bad = judge.evaluate(
        make_reaction("r3", {"c1ccccc1", "CC"}, "CCc1ccccc1"), plan);
    CHECK(bad.raw == 1);
    auto good = judge.evaluate(make_reaction("r4", {"CCO", "CC"}, "CCOCC"), plan);
    CHECK(good.raw == 5);
    CHECK(good.transcript.find("Carcinogenicity") != std::string::npos);
  }
  SECTION("pyrophoric member scores 1, unrelated scores 5") {
    auto plan = judge.plan(Constraint::avoid_pyrophorics());
    auto bad = judge.evaluate(
        make_reaction("r5", {"CC(C)(C)[Li]", "O=CC"}, "CC(O)C(C)(C)C"), plan);
    CHECK(bad.raw == 1);
    auto good = judge.evaluate(make_reaction("r6", {"OCC(N)=O"}, "NCC(O)=O"), plan);
    CHECK(good.raw == 5);
  }
}

TEST_CASE("rule threshold bands") {
  using K = ConstraintKind;
  CHECK(rule_score_from_value(K::AvoidCarcinogens, 0.95) == 1);
  CHECK(rule_score_from_value(K::AvoidCarcinogens, 0.75) == 2);
  CHECK(rule_score_from_value(K::AvoidCarcinogens, 0.55) == 3);
  CHECK(rule_score_from_value(K::AvoidCarcinogens, 0.35) == 4);
  CHECK(rule_score_from_value(K::AvoidCarcinogens, 0.1) == 5);
  CHECK(rule_score_from_value(K::AvoidPyrophorics, 1.0) == 1);
  CHECK(rule_score_from_value(K::AvoidPyrophorics, 0.85) == 2);
  CHECK(rule_score_from_value(K::AvoidPyrophorics, 0.65) == 3);
  CHECK(rule_score_from_value(K::AvoidPyrophorics, 0.45) == 4);
  CHECK(rule_score_from_value(K::AvoidPyrophorics, 0.2) == 5);
  CHECK(rule_score_from_value(K::AvoidSubstance, 1.0) == 1);
  CHECK(rule_score_from_value(K::AvoidSubstance, 0.0) == 5);
}

TEST_CASE("evaluation cache, budget and idempotence") {
  RuleWorld world;
  RuleJudge judge(world.env);
  PlannerConfig cfg;
  cfg.n_eval = 3;

  auto constraint = Constraint::avoid_carcinogens();
  auto plan = judge.plan(constraint);
  EvaluationCache cache;

  auto r1 = make_reaction("r1", {"CCO"}, "CC=O");
  auto first = evaluate_reaction(r1, plan, cache, cfg, judge);
  CHECK(first.provenance == ScoreProvenance::Evaluated);
  CHECK(cache.invocations() == 1);

  auto again = evaluate_reaction(r1, plan, cache, cfg, judge);
  CHECK(again == first);
  CHECK(cache.invocations() == 1);

  // Reactant order must not change the cache key.
  auto r1_swapped = make_reaction("other", {"CCO"}, "CC=O");
  CHECK(EvaluationCache::key(r1, constraint) ==
        EvaluationCache::key(r1_swapped, constraint));
  auto r_multi_a = make_reaction("ma", {"CC", "CCO"}, "CCOCC");
  auto r_multi_b = make_reaction("mb", {"CCO", "CC"}, "CCOCC");
  CHECK(EvaluationCache::key(r_multi_a, constraint) ==
        EvaluationCache::key(r_multi_b, constraint));

  evaluate_reaction(make_reaction("r2", {"CC"}, "CCC"), plan, cache, cfg, judge);
  evaluate_reaction(make_reaction("r3", {"CCC"}, "CCCC"), plan, cache, cfg, judge);
  CHECK(cache.invocations() == 3);

  // Budget exhausted: default score, no further invocations.
  auto beyond = evaluate_reaction(make_reaction("r4", {"CCCC"}, "CCCCC"), plan,
                                  cache, cfg, judge);
  CHECK(beyond.provenance == ScoreProvenance::Default);
  CHECK(beyond.raw == cfg.default_score);
  CHECK(beyond.normalized == 1.0);
  CHECK(cache.invocations() == 3);

  // The defaulted entry is cached too and sticks on re-query.
  auto beyond2 = evaluate_reaction(make_reaction("r4", {"CCCC"}, "CCCCC"), plan,
                                   cache, cfg, judge);
  CHECK(beyond2.provenance == ScoreProvenance::Default);

  // Different constraints do not collide in the cache.
  CHECK(EvaluationCache::key(r1, constraint) !=
        EvaluationCache::key(r1, Constraint::avoid_pyrophorics()));
}

TEST_CASE("llm judge speaks the two-phase protocol") {
  RuleWorld world;

  SECTION("plan then evaluate with scripted transport") {
    int turn = 0;
    ChatTransport transport = [&](const std::vector<ChatMessage>& messages) {
      ++turn;
      if (turn == 1) {
        CHECK(messages.size() == 1);
        CHECK(messages[0].content.find("carcinogenic") != std::string::npos);
        return std::string(
            "I will check every molecule.\n```\nCarcinogenicity(all reaction "
            "molecules)\n```\nRubric: 1 if any probability is 1.000, else 5.");
      }
      if (turn == 2) {
        return std::string("```\nCarcinogenicity(`c1ccccc1`, `CC`, `CCc1ccccc1`)\n```");
      }
      const auto& outputs = messages[messages.size() - 1].content;
      if (outputs.find("1.000") != std::string::npos)
        return std::string("Reasoning: benzene is listed.\nAnswer: 1");
      return std::string("Reasoning: clean.\nAnswer: 5");
    };
    LlmJudge judge(transport, world.env);
    auto plan = judge.plan(Constraint::avoid_carcinogens());
    CHECK(plan.instructions.find("Carcinogenicity") != std::string::npos);
    REQUIRE_FALSE(plan.steps.empty());
    CHECK(plan.steps[0].tool == toolbox::ToolName::Carcinogenicity);

    auto verdict = judge.evaluate(
        make_reaction("r", {"c1ccccc1", "CC"}, "CCc1ccccc1"), plan);
    CHECK(verdict.raw == 1);
    CHECK_FALSE(verdict.fallback);
    CHECK(verdict.transcript.find("Carcinogenicity: 1.000") != std::string::npos);
  }

  SECTION("claude-style Answer(N) form") {
    int turn = 0;
    ChatTransport transport = [&](const std::vector<ChatMessage>&) {
      ++turn;
      if (turn == 1) return std::string("```\nPyrophoricity(every molecule)\n```");
      if (turn == 2) return std::string("```\nPyrophoricity(`CCO`, `CC`)\n```");
      return std::string("```Answer(4)```");
    };
    LlmJudge judge(transport, world.env);
    auto plan = judge.plan(Constraint::avoid_pyrophorics());
    auto verdict = judge.evaluate(make_reaction("r", {"CCO"}, "CC"), plan);
    CHECK(verdict.raw == 4);
  }

  SECTION("retry then fallback on unparseable score") {
    int turn = 0;
    int scoring_calls = 0;
    ChatTransport transport = [&](const std::vector<ChatMessage>&) {
      ++turn;
      if (turn == 1) return std::string("```\nSimilarity(reactant, product)\n```");
      if (turn == 2) return std::string("```\nSimilarity(`CCO`, `CC`)\n```");
      ++scoring_calls;
      return std::string("I cannot decide.");
    };
    LlmJudge judge(transport, world.env);
    auto plan = judge.plan(Constraint::avoid_carcinogens());
    auto verdict = judge.evaluate(make_reaction("r", {"CCO"}, "CC"), plan);
    CHECK(verdict.fallback);
    CHECK(verdict.raw == 3);
    CHECK(scoring_calls == 2);  // one retry
  }

  SECTION("retry on unparseable action block") {
    int turn = 0;
    ChatTransport transport = [&](const std::vector<ChatMessage>&) {
      ++turn;
      if (turn == 1) return std::string("```\nIdentify(molecule, target)\n```");
      if (turn == 2) return std::string("no block at all");
      if (turn == 3) return std::string("```\nIdentify(`CCO`, `CCO`)\n```");
      return std::string("Answer: 1");
    };
    LlmJudge judge(transport, world.env);
    auto plan = judge.plan(Constraint::avoid_substance("CCO"));
    auto verdict = judge.evaluate(make_reaction("r", {"CCO"}, "CC"), plan);
    CHECK(verdict.raw == 1);
    CHECK_FALSE(verdict.fallback);
  }

  SECTION("AIExpert in rule-mode registry returns the fixed notice") {
    int turn = 0;
    ChatTransport transport = [&](const std::vector<ChatMessage>& messages) {
      ++turn;
      if (turn == 1) return std::string("```\nAIExpert(ask about conditions)\n```");
      if (turn == 2) return std::string("```\nAIExpert(`what catalyst?`)\n```");
      CHECK(messages.back().content.find("no external expert available") !=
            std::string::npos);
      return std::string("Answer: 3");
    };
    LlmJudge judge(transport, world.env);
    auto plan = judge.plan(Constraint::avoid_carcinogens());
    auto verdict = judge.evaluate(make_reaction("r", {"CCO"}, "CC"), plan);
    CHECK(verdict.raw == 3);
    CHECK_FALSE(verdict.fallback);
  }
}

TEST_CASE("prompt data files match the embedded templates") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(LARC_DATA_DIR) / "prompts";
  auto loaded = PromptSet::load_dir(dir);
  const auto& embedded = PromptSet::embedded();
  CHECK(loaded.planning == embedded.planning);
  CHECK(loaded.reaction_step == embedded.reaction_step);
  CHECK(loaded.scoring_step == embedded.scoring_step);
}

TEST_CASE("constraint fingerprints and validation") {
  CHECK(Constraint::avoid_carcinogens().fingerprint() == "avoid_carcinogens");
  CHECK(Constraint::avoid_substance("OCC").fingerprint() ==
        Constraint::avoid_substance("CCO").fingerprint());
  CHECK_THROWS(Constraint{ConstraintKind::AvoidCarcinogens,
                          chem::canonicalize("C"), {}}
                   .validate());
}
