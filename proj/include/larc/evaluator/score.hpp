// Reaction scores on the 1-5 scale, their [0,1] normalization, and parsing
// of final-answer tokens from judge transcripts.
#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace larc::evaluator {

enum class ScoreProvenance { Evaluated, Default, Fallback };

inline std::string_view to_string(ScoreProvenance p) {
  switch (p) {
    case ScoreProvenance::Evaluated: return "evaluated";
    case ScoreProvenance::Default: return "default";
    case ScoreProvenance::Fallback: return "fallback";
  }
  return "?";
}

// 1 -> 0.0, 5 -> 1.0.
inline double normalize_score(int raw) {
  if (raw < 1 || raw > 5)
    throw std::out_of_range("raw score outside [1,5]: " + std::to_string(raw));
  return (raw - 1) / 4.0;
}

struct ReactionScore {
  int raw = 5;
  double normalized = 1.0;
  ScoreProvenance provenance = ScoreProvenance::Evaluated;
  std::string transcript;

  static ReactionScore make(int raw, ScoreProvenance provenance,
                            std::string transcript = {}) {
    return ReactionScore{raw, normalize_score(raw), provenance,
                         std::move(transcript)};
  }

  friend bool operator==(const ReactionScore& a, const ReactionScore& b) {
    return a.raw == b.raw && a.normalized == b.normalized &&
           a.provenance == b.provenance && a.transcript == b.transcript;
  }
};

class ScoreParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Accepts both "Answer: N" and "Answer(N)"; the last occurrence wins and the
// value is clamped to [1,5] (clamping noted in `diagnostic`).
inline int parse_final_score(std::string_view text,
                             std::string* diagnostic = nullptr) {
  std::optional<long> found;
  std::size_t pos = 0;
  constexpr std::string_view kToken = "Answer";
  while (true) {
    const auto at = text.find(kToken, pos);
    if (at == std::string_view::npos) break;
    pos = at + kToken.size();
    std::size_t i = pos;
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    char close = 0;
    if (text[i] == ':') {
      ++i;
    } else if (text[i] == '(') {
      ++i;
      close = ')';
    } else {
      continue;
    }
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
      neg = text[i] == '-';
      ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
      continue;
    long value = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      value = value * 10 + (text[i] - '0');
      if (value > 1000) break;
      ++i;
    }
    if (close) {
      std::size_t j = i;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
      if (j >= text.size() || text[j] != close) continue;
    }
    found = neg ? -value : value;
  }
  if (!found)
    throw ScoreParseError("no final answer token found in transcript");
  long v = *found;
  if (v < 1 || v > 5) {
    if (diagnostic)
      *diagnostic = "answer " + std::to_string(v) + " clamped to [1,5]";
    v = v < 1 ? 1 : 5;
  }
  return static_cast<int>(v);
}

}  // namespace larc::evaluator
