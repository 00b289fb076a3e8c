#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sorites {

enum class Errc {
  NotNormalized,
  NegativeWeight,
  UnknownVariableOrValue,
  DuplicateAssignment,
  UnknownVariable,
  InvalidSchema,
  ZeroProbabilityCondition,
  OutOfRangeAngle,
  NotExactlyRepresentable,
  EvenOrNonPositiveN,
  InvalidModel,
  UndefinedConditional,
  ChainMismatch,
  NonBinaryVariable,
  IncompleteChain,
  InfeasibleChain,
  WrongSlackCount,
  ChainTooLarge,
  UnknownSettingPair,
  TooFewTrials,
  ParseError,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::UnknownVariableOrValue: return "UnknownVariableOrValue";
    case Errc::DuplicateAssignment: return "DuplicateAssignment";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
    case Errc::OutOfRangeAngle: return "OutOfRangeAngle";
    case Errc::NotExactlyRepresentable: return "NotExactlyRepresentable";
    case Errc::EvenOrNonPositiveN: return "EvenOrNonPositiveN";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::UndefinedConditional: return "UndefinedConditional";
    case Errc::ChainMismatch: return "ChainMismatch";
    case Errc::NonBinaryVariable: return "NonBinaryVariable";
    case Errc::IncompleteChain: return "IncompleteChain";
    case Errc::InfeasibleChain: return "InfeasibleChain";
    case Errc::WrongSlackCount: return "WrongSlackCount";
    case Errc::ChainTooLarge: return "ChainTooLarge";
    case Errc::UnknownSettingPair: return "UnknownSettingPair";
    case Errc::TooFewTrials: return "TooFewTrials";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the Errc kinds so that
/// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sorites
