// The evaluator's external tools: carcinogenicity, pyrophoricity, pairwise
// similarity and molecule identification, plus the registry that dispatches
// parsed ToolCalls and renders results back into transcript text.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "larc/chem/canonical.hpp"
#include "larc/chem/fingerprint.hpp"
#include "larc/toolbox/action.hpp"
#include "larc/toolbox/hazard_list.hpp"

namespace larc::toolbox {

class ToolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ToolResultItem {
  std::string input;
  std::optional<double> value;  // score tools
  std::optional<bool> matched;  // Identify
  std::string error;            // per-item failure, e.g. unparseable SMILES

  bool ok() const { return error.empty(); }
};

struct ToolResult {
  ToolName tool = ToolName::AIExpert;
  std::vector<ToolResultItem> items;
  std::string diagnostics;
  std::string rendered;  // textual form fed back into evaluator transcripts
};

inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

namespace detail {

inline void render(ToolResult& r) {
  std::string out(to_string(r.tool));
  out += ": ";
  for (std::size_t i = 0; i < r.items.size(); ++i) {
    if (i) out += ", ";
    const auto& item = r.items[i];
    if (!item.ok())
      out += "error(" + item.error + ")";
    else if (item.matched.has_value())
      out += *item.matched ? "true" : "false";
    else if (item.value.has_value())
      out += format_score(*item.value);
  }
  if (r.items.empty()) out += r.diagnostics;
  r.rendered = out;
}

inline std::optional<chem::CanonicalSmiles> try_canonical(
    const std::string& smiles, std::string& error) {
  try {
    return chem::canonicalize(smiles);
  } catch (const chem::ParseError& e) {
    error = e.what();
    return std::nullopt;
  }
}

}  // namespace detail

// Probability source for the carcinogenicity tool. The lookup backend is the
// default; a remote HTTP predictor can be swapped in behind the same call.
class CarcinogenBackend {
public:
  virtual ~CarcinogenBackend() = default;
  // One probability in [0,1] per canonical SMILES, order preserving.
  // Throws ToolError when the backend itself is unavailable.
  virtual std::vector<double> predict(
      const std::vector<std::string>& canonical_smiles) const = 0;
};

class LookupCarcinogenBackend : public CarcinogenBackend {
public:
  explicit LookupCarcinogenBackend(const HazardList* list) : list_(list) {}

  std::vector<double> predict(
      const std::vector<std::string>& canonical_smiles) const override {
    std::vector<double> out;
    out.reserve(canonical_smiles.size());
    for (const auto& s : canonical_smiles) {
      out.push_back(list_ ? list_->lookup_probability(chem::CanonicalSmiles(s))
                          : 0.0);
    }
    return out;
  }

private:
  const HazardList* list_;
};

inline ToolResult carcinogenicity(const std::vector<std::string>& mols,
                                  const CarcinogenBackend& backend) {
  ToolResult result;
  result.tool = ToolName::Carcinogenicity;
  std::vector<std::string> canonical;
  std::vector<std::size_t> positions;
  for (const auto& m : mols) {
    ToolResultItem item;
    item.input = m;
    std::string error;
    if (auto c = detail::try_canonical(m, error)) {
      positions.push_back(result.items.size());
      canonical.push_back(c->text);
    } else {
      item.error = error;
    }
    result.items.push_back(std::move(item));
  }
  if (!canonical.empty()) {
    const auto scores = backend.predict(canonical);
    if (scores.size() != canonical.size())
      throw ToolError("carcinogenicity backend returned wrong count");
    for (std::size_t i = 0; i < positions.size(); ++i)
      result.items[positions[i]].value = std::clamp(scores[i], 0.0, 1.0);
  }
  detail::render(result);
  return result;
}

// Max Tanimoto similarity to the reference list; exact membership gives 1.0.
inline ToolResult pyrophoricity(const std::vector<std::string>& mols,
                                const HazardList& list) {
  if (list.empty()) throw ToolError("pyrophoricity list is empty");
  ToolResult result;
  result.tool = ToolName::Pyrophoricity;
  for (const auto& m : mols) {
    ToolResultItem item;
    item.input = m;
    try {
      auto frags = chem::parse_smiles(m);
      auto fp = chem::morgan_fingerprint(frags[0]);
      item.value = list.max_similarity(fp);
    } catch (const chem::ParseError& e) {
      item.error = e.what();
    }
    result.items.push_back(std::move(item));
  }
  detail::render(result);
  return result;
}

inline ToolResult similarity(const std::string& a, const std::string& b) {
  ToolResult result;
  result.tool = ToolName::Similarity;
  ToolResultItem item;
  item.input = a + " | " + b;
  try {
    auto ga = chem::parse_smiles(a);
    auto gb = chem::parse_smiles(b);
    item.value = chem::tanimoto(chem::morgan_fingerprint(ga[0]),
                                chem::morgan_fingerprint(gb[0]));
  } catch (const chem::ParseError& e) {
    item.error = e.what();
  }
  result.items.push_back(std::move(item));
  detail::render(result);
  return result;
}

// True iff both canonical forms are equal; fingerprint equality first as a
// cheap pre-filter.
inline ToolResult identify(const std::string& m, const std::string& target) {
  ToolResult result;
  result.tool = ToolName::Identify;
  ToolResultItem item;
  item.input = m;
  try {
    auto gm = chem::parse_smiles(m);
    auto gt = chem::parse_smiles(target);
    if (chem::morgan_fingerprint(gm[0]) != chem::morgan_fingerprint(gt[0])) {
      item.matched = false;
    } else {
      item.matched = chem::canonicalize(m) == chem::canonicalize(target);
    }
  } catch (const chem::ParseError& e) {
    item.error = e.what();
  }
  result.items.push_back(std::move(item));
  detail::render(result);
  return result;
}

// Immutable after configuration; dispatch target for parsed action blocks.
struct ToolRegistry {
  const CarcinogenBackend* carcinogens = nullptr;
  const HazardList* pyrophorics = nullptr;
  // Unset handler means rule mode: AIExpert answers with a fixed notice.
  std::function<std::string(const std::string&)> ai_expert;
};

inline ToolResult execute(const ToolCall& call, const ToolRegistry& env) {
  const auto arity_error = [&](const char* expect) -> ToolError {
    return ToolError(std::string(to_string(call.name)) + " expects " + expect +
                     ", got " + std::to_string(call.args.size()));
  };
  switch (call.name) {
    case ToolName::Carcinogenicity: {
      if (call.args.empty()) throw arity_error("at least 1 argument");
      if (!env.carcinogens) throw ToolError("Carcinogenicity not registered");
      return carcinogenicity(call.args, *env.carcinogens);
    }
    case ToolName::Pyrophoricity: {
      if (call.args.empty()) throw arity_error("at least 1 argument");
      if (!env.pyrophorics) throw ToolError("Pyrophoricity not registered");
      return pyrophoricity(call.args, *env.pyrophorics);
    }
    case ToolName::Similarity: {
      if (call.args.size() != 2) throw arity_error("exactly 2 arguments");
      return similarity(call.args[0], call.args[1]);
    }
    case ToolName::Identify: {
      if (call.args.size() != 2) throw arity_error("exactly 2 arguments");
      return identify(call.args[0], call.args[1]);
    }
    case ToolName::AIExpert: {
      if (call.args.empty()) throw arity_error("at least 1 argument");
      ToolResult r;
      r.tool = ToolName::AIExpert;
      r.diagnostics = env.ai_expert ? env.ai_expert(call.args[0])
                                    : "no external expert available";
      detail::render(r);
      return r;
    }
    case ToolName::Answer: {
      if (call.args.size() != 1) throw arity_error("exactly 1 argument");
      ToolResult r;
      r.tool = ToolName::Answer;
      r.diagnostics = call.args[0];
      detail::render(r);
      return r;
    }
  }
  throw ToolError("unregistered tool");
}

}  // namespace larc::toolbox
