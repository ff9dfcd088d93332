// Language-model judge speaking the action-block protocol: one planning
// exchange per task, then per reaction a tool-selection turn followed by a
// scoring turn. Transport is injectable; an HTTP chat-completion client is
// provided for real endpoints.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "larc/evaluator/judge.hpp"
#include "larc/toolbox/action.hpp"
#include "larc/toolbox/remote_predictor.hpp"

namespace larc::evaluator {

using ChatTransport =
    std::function<std::string(const std::vector<ChatMessage>&)>;

class TransportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Instruction templates with {constraint}, {reactants}, {product},
// {evaluation instructions} and {tool outputs} placeholders. The embedded
// texts match the copies shipped under data/prompts/.
struct PromptSet {
  std::string planning;
  std::string reaction_step;
  std::string scoring_step;

  static const PromptSet& embedded() {
    static const PromptSet prompts = [] {
      PromptSet p;
      p.planning = R"(You are an expert chemist judging whether a single reaction (reactants>>product) satisfies one constraint.

These tools are available:
- AIExpert(question): ask a self-contained chemistry question when no other tool applies.
- Carcinogenicity(SMILES1, SMILES2, ...): one probability per molecule that it is carcinogenic; batching several molecules into one call is preferred.
- Pyrophoricity(SMILES1, SMILES2, ...): one score per molecule giving the Tanimoto similarity to its nearest neighbor on a reference list of pyrophoric substances; 1.000 means the molecule is on the list.
- Similarity(SMILES1, SMILES2): Tanimoto similarity between exactly two molecules.
- Identify(SMILES, TARGET): whether a molecule is exactly the target substance.

Write the evaluation instructions you will follow for every reaction: which tools to call and a rubric mapping their outputs to a score from 1 to 5, where 5 means the constraint is fully satisfied and 1 means it is completely violated. The rubric must state when to give 1 and when to give 5. Identify the planned actions inside one triple-backtick block, one action per line, in the form:

```
ActionName(description of inputs)
```

Use as few actions as possible.

Constraint: {constraint}
)";
      p.reaction_step = R"(Reaction to judge:
Reactants: {reactants}
Product: `{product}`

Multiple reactants are separated by dots. Fill in your planned actions with the concrete SMILES of this reaction. Reply with a single triple-backtick block, one action per line, inputs wrapped in backticks:

```
ActionName(ActionInput1, ActionInput2, ...)
```

Do not add anything else. Await the results.
)";
      p.scoring_step = R"(Tool results:
{tool outputs}

Apply your rubric to these results and give the final score for the constraint only. Reply in this exact format:

Reasoning: (your analysis)
Answer: N

where N is an integer from 1 to 5.
)";
      return p;
    }();
    return prompts;
  }

  static PromptSet load_dir(const std::filesystem::path& dir) {
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p);
      if (!in) throw std::runtime_error("cannot open prompt file: " + p.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    PromptSet p;
    p.planning = slurp(dir / "planning.txt");
    p.reaction_step = slurp(dir / "reaction_step.txt");
    p.scoring_step = slurp(dir / "scoring_step.txt");
    return p;
  }
};

inline std::string substitute(std::string text, std::string_view placeholder,
                              std::string_view value) {
  const std::string token = "{" + std::string(placeholder) + "}";
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

struct LlmJudgeOptions {
  int max_retries = 1;           // per failing phase
  int fallback_score = 3;        // neutral, flagged provenance=fallback
};

class LlmJudge : public Judge {
public:
  LlmJudge(ChatTransport transport, toolbox::ToolRegistry env,
           PromptSet prompts = PromptSet::embedded(), LlmJudgeOptions opt = {})
      : transport_(std::move(transport)),
        env_(std::move(env)),
        prompts_(std::move(prompts)),
        opt_(opt) {}

  EvaluationPlan plan(const Constraint& c) override {
    c.validate();
    EvaluationPlan plan;
    plan.kind = c.kind;
    plan.constraint = c;
    const std::string request =
        substitute(prompts_.planning, "constraint", c.prompt_text());
    std::vector<ChatMessage> messages{{"system", request}};
    const std::string reply = transport_(messages);
    plan.instructions = reply;  // stored verbatim
    plan.transcript = request + "\n---\n" + reply;
    plan.context = {{"system", request}, {"assistant", reply}};
    try {
      for (const auto& call : toolbox::parse_action_block(reply))
        plan.steps.push_back(PlanStep{call.name,
                                      call.args.empty() ? "" : call.args[0]});
    } catch (const toolbox::ActionParseError&) {
      // Instructions without a parseable block still drive evaluation; the
      // reaction step restates the required format.
      plan.steps.push_back(
          PlanStep{toolbox::ToolName::AIExpert, "follow the stored instructions"});
    }
    plan.rubric = {{1, "constraint completely violated"},
                   {5, "constraint fully satisfied"}};
    plan.validate();
    return plan;
  }

  JudgeVerdict evaluate(const synthesizer::Reaction& r,
                        const EvaluationPlan& plan) override {
    std::string reactants;
    for (std::size_t i = 0; i < r.reactants.size(); ++i) {
      if (i) reactants += '.';
      reactants += '`' + r.reactants[i].text + '`';
    }
    std::string step1 = substitute(prompts_.reaction_step, "reactants", reactants);
    step1 = substitute(std::move(step1), "product", r.product.text);
    step1 = substitute(std::move(step1), "evaluation instructions",
                       plan.instructions);

    std::string transcript;
    auto record = [&transcript](std::string_view tag, const std::string& text) {
      transcript += std::string(tag) + ":\n" + text + "\n---\n";
    };

    // Phase 1: tool selection, with one retry on an unparseable block.
    std::vector<ChatMessage> messages = plan.context;
    messages.push_back({"user", step1});
    record("user", step1);
    std::vector<toolbox::ToolCall> calls;
    std::string reply1;
    bool parsed = false;
    for (int attempt = 0; attempt <= opt_.max_retries && !parsed; ++attempt) {
      reply1 = transport_(messages);
      record("assistant", reply1);
      try {
        calls = toolbox::parse_action_block(reply1);
        parsed = true;
      } catch (const toolbox::ActionParseError& e) {
        if (attempt == opt_.max_retries) {
          record("engine", std::string("tool selection unparseable: ") + e.what());
          return JudgeVerdict{opt_.fallback_score, transcript, true};
        }
        messages.push_back({"assistant", reply1});
        messages.push_back(
            {"user",
             "The previous reply had no parseable action block. Reply with "
             "exactly one triple-backtick block of tool calls."});
      }
    }

    // Execute tools; Answer calls are deferred to the scoring phase.
    std::string outputs;
    int inline_answer = -1;
    for (const auto& call : calls) {
      if (call.name == toolbox::ToolName::Answer) {
        if (!call.args.empty()) {
          try {
            inline_answer = parse_final_score("Answer(" + call.args[0] + ")");
          } catch (const ScoreParseError&) {
          }
        }
        continue;
      }
      try {
        outputs += toolbox::execute(call, env_).rendered + "\n";
      } catch (const toolbox::ToolError& e) {
        outputs += std::string(toolbox::to_string(call.name)) + ": error(" +
                   e.what() + ")\n";
      }
    }
    record("tools", outputs);

    // A bare Answer with no tool calls short-circuits the scoring turn.
    if (outputs.empty() && inline_answer >= 1) {
      transcript += "Answer: " + std::to_string(inline_answer) + "\n";
      return JudgeVerdict{inline_answer, transcript, false};
    }

    // Phase 2: scoring, with one retry on a missing answer token.
    const std::string step2 =
        substitute(prompts_.scoring_step, "tool outputs", outputs);
    messages.push_back({"assistant", reply1});
    messages.push_back({"user", step2});
    record("user", step2);
    for (int attempt = 0; attempt <= opt_.max_retries; ++attempt) {
      const std::string reply2 = transport_(messages);
      record("assistant", reply2);
      try {
        std::string diag;
        const int raw = parse_final_score(reply2, &diag);
        if (!diag.empty()) record("engine", diag);
        return JudgeVerdict{raw, transcript, false};
      } catch (const ScoreParseError& e) {
        if (attempt == opt_.max_retries) {
          record("engine", std::string("score unparseable: ") + e.what());
          return JudgeVerdict{opt_.fallback_score, transcript, true};
        }
        messages.push_back(
            {"user", "Reply with the final score as `Answer: N` only."});
      }
    }
    return JudgeVerdict{opt_.fallback_score, transcript, true};
  }

  std::string_view mode() const override { return "llm"; }

private:
  ChatTransport transport_;
  toolbox::ToolRegistry env_;
  PromptSet prompts_;
  LlmJudgeOptions opt_;
};

// Chat-completion HTTP transport. Base URL, model and key come from the
// LARC_LLM_URL, LARC_LLM_MODEL and LARC_LLM_KEY environment variables unless
// given explicitly; temperature is 0 for reproducibility.
class HttpChatTransport {
public:
  struct Config {
    std::string url;
    std::string model;
    std::string api_key;
    double temperature = 0.0;
    int timeout_seconds = 120;

    static Config from_env() {
      Config c;
      if (const char* v = std::getenv("LARC_LLM_URL")) c.url = v;
      if (const char* v = std::getenv("LARC_LLM_MODEL")) c.model = v;
      if (const char* v = std::getenv("LARC_LLM_KEY")) c.api_key = v;
      return c;
    }
  };

  explicit HttpChatTransport(Config cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty())
      throw TransportError("LLM endpoint URL not configured (LARC_LLM_URL)");
  }

  std::string operator()(const std::vector<ChatMessage>& messages) const {
    const auto ep = toolbox::RemoteEndpoint::parse(cfg_.url);
    httplib::Client client(ep.host, ep.port);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    nlohmann::json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages)
      msgs.push_back({{"role", m.role}, {"content", m.content}});
    httplib::Headers headers;
    if (!cfg_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    auto res = client.Post(ep.path, headers, body.dump(), "application/json");
    if (!res)
      throw TransportError("LLM endpoint unreachable: " +
                           httplib::to_string(res.error()));
    if (res->status != 200)
      throw TransportError("LLM endpoint returned HTTP " +
                           std::to_string(res->status));
    try {
      auto parsed = nlohmann::json::parse(res->body);
      return parsed.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("bad LLM response: ") + e.what());
    }
  }

private:
  Config cfg_;
};

}  // namespace larc::evaluator
