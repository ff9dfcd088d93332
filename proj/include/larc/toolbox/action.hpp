// The action-block protocol: tool invocations written one per line inside a
// triple-backtick block, "Name(arg, arg, ...)", arguments optionally wrapped
// in quotes or backticks.
#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace larc::toolbox {

enum class ToolName {
  AIExpert,
  Carcinogenicity,
  Pyrophoricity,
  Similarity,
  Identify,
  Answer,
};

inline std::string_view to_string(ToolName t) {
  switch (t) {
    case ToolName::AIExpert: return "AIExpert";
    case ToolName::Carcinogenicity: return "Carcinogenicity";
    case ToolName::Pyrophoricity: return "Pyrophoricity";
    case ToolName::Similarity: return "Similarity";
    case ToolName::Identify: return "Identify";
    case ToolName::Answer: return "Answer";
  }
  return "?";
}

inline std::optional<ToolName> tool_from_string(std::string_view s) {
  if (s == "AIExpert") return ToolName::AIExpert;
  if (s == "Carcinogenicity") return ToolName::Carcinogenicity;
  if (s == "Pyrophoricity") return ToolName::Pyrophoricity;
  if (s == "Similarity") return ToolName::Similarity;
  if (s == "Identify") return ToolName::Identify;
  if (s == "Answer") return ToolName::Answer;
  return std::nullopt;
}

struct ToolCall {
  ToolName name = ToolName::AIExpert;
  std::vector<std::string> args;

  friend bool operator==(const ToolCall& a, const ToolCall& b) {
    return a.name == b.name && a.args == b.args;
  }
};

class ActionParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string strip_wrappers(std::string arg) {
  arg = trim(arg);
  while (arg.size() >= 2) {
    const char f = arg.front(), l = arg.back();
    if ((f == '`' && l == '`') || (f == '"' && l == '"') ||
        (f == '\'' && l == '\'')) {
      arg = arg.substr(1, arg.size() - 2);
      arg = trim(arg);
    } else {
      break;
    }
  }
  return arg;
}

inline std::optional<ToolCall> parse_action_line(std::string_view raw) {
  std::string line = trim(raw);
  // Planning-style lines may carry an "Action:" prefix.
  constexpr std::string_view kPrefix = "Action:";
  if (line.rfind(kPrefix, 0) == 0) line = trim(line.substr(kPrefix.size()));
  const auto open = line.find('(');
  if (open == std::string::npos || line.empty() || line.back() != ')')
    return std::nullopt;
  const std::string name = trim(line.substr(0, open));
  const auto tool = tool_from_string(name);
  if (!tool) return std::nullopt;
  const std::string inner = line.substr(open + 1, line.size() - open - 2);
  ToolCall call;
  call.name = *tool;
  std::string current;
  int depth = 0;
  bool any = false;
  for (char c : inner) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      call.args.push_back(strip_wrappers(current));
      current.clear();
      any = true;
    } else {
      current += c;
    }
  }
  if (any || !trim(current).empty()) call.args.push_back(strip_wrappers(current));
  return call;
}

}  // namespace detail

// Extracts the last triple-backtick block and parses one ToolCall per line.
// Unknown tool names are skipped per-line; having no code block or no
// parseable line is an error.
inline std::vector<ToolCall> parse_action_block(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t pos = 0;
  for (;;) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto close = text.find("```", open + 3);
    if (close == std::string_view::npos) break;
    blocks.emplace_back(open + 3, close);
    pos = close + 3;
  }
  if (blocks.empty())
    throw ActionParseError("no triple-backtick action block found");
  const auto [begin, end] = blocks.back();
  std::string_view body = text.substr(begin, end - begin);

  std::vector<ToolCall> calls;
  std::size_t line_start = 0;
  while (line_start <= body.size()) {
    auto line_end = body.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = body.size();
    const auto call = detail::parse_action_line(
        body.substr(line_start, line_end - line_start));
    if (call) calls.push_back(*call);
    if (line_end == body.size()) break;
    line_start = line_end + 1;
  }
  if (calls.empty())
    throw ActionParseError("action block contains no parseable tool call");
  return calls;
}

// Inverse of parse_action_block on well-formed call lists.
inline std::string render_action_block(const std::vector<ToolCall>& calls) {
  std::string out = "```\n";
  for (const auto& call : calls) {
    out += to_string(call.name);
    out += '(';
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      if (i) out += ", ";
      out += '`';
      out += call.args[i];
      out += '`';
    }
    out += ")\n";
  }
  out += "```";
  return out;
}

}  // namespace larc::toolbox
