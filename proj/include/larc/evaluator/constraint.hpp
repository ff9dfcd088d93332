// User constraints: avoid carcinogens, avoid pyrophoric substances, or avoid
// one user-specified substance.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "larc/chem/canonical.hpp"

namespace larc::evaluator {

enum class ConstraintKind {
  AvoidCarcinogens,
  AvoidPyrophorics,
  AvoidSubstance,
};

inline std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::AvoidCarcinogens: return "avoid_carcinogens";
    case ConstraintKind::AvoidPyrophorics: return "avoid_pyrophorics";
    case ConstraintKind::AvoidSubstance: return "avoid_substance";
  }
  return "?";
}

inline ConstraintKind constraint_kind_from_string(std::string_view s) {
  if (s == "avoid_carcinogens") return ConstraintKind::AvoidCarcinogens;
  if (s == "avoid_pyrophorics") return ConstraintKind::AvoidPyrophorics;
  if (s == "avoid_substance") return ConstraintKind::AvoidSubstance;
  throw std::invalid_argument("unknown constraint kind: " + std::string(s));
}

struct Constraint {
  ConstraintKind kind = ConstraintKind::AvoidCarcinogens;
  std::optional<chem::CanonicalSmiles> payload;  // required iff AvoidSubstance
  std::string description;

  void validate() const {
    if (kind == ConstraintKind::AvoidSubstance && !payload)
      throw std::invalid_argument("avoid_substance requires a payload SMILES");
    if (kind != ConstraintKind::AvoidSubstance && payload)
      throw std::invalid_argument("payload only valid for avoid_substance");
  }

  // Cache key component: kind plus canonical payload.
  std::string fingerprint() const {
    std::string out(to_string(kind));
    if (payload) {
      out += ':';
      out += payload->text;
    }
    return out;
  }

  // Free text used in prompts; falls back to a standard phrasing per kind.
  std::string prompt_text() const {
    if (!description.empty()) return description;
    switch (kind) {
      case ConstraintKind::AvoidCarcinogens:
        return "The synthetic route must not involve any carcinogenic substance.";
      case ConstraintKind::AvoidPyrophorics:
        return "The synthetic route must not involve any pyrophoric substance.";
      case ConstraintKind::AvoidSubstance:
        return "The synthetic route must not involve the substance `" +
               (payload ? payload->text : std::string("?")) + "`.";
    }
    return {};
  }

  static Constraint avoid_carcinogens() {
    return Constraint{ConstraintKind::AvoidCarcinogens, std::nullopt, {}};
  }
  static Constraint avoid_pyrophorics() {
    return Constraint{ConstraintKind::AvoidPyrophorics, std::nullopt, {}};
  }
  static Constraint avoid_substance(std::string_view smiles) {
    return Constraint{ConstraintKind::AvoidSubstance, chem::canonicalize(smiles), {}};
  }
};

}  // namespace larc::evaluator
