#pragma once

#include <string>
#include <vector>

#include "sizedlang/token.hpp"

namespace sizedlang {

enum class ErrorCode {
  Lexical,              // E001
  Parse,                // E002
  UnboundIdentifier,    // E010
  DuplicateDefinition,  // E011
  SynonymArity,         // E012
  ScopeOther,           // E013
  Mismatch,             // E020
  NotASubtype,          // E021
  BoundViolation,       // E022
  MeasureNotDecreasing, // E023
  NonExhaustive,        // E024
  UnboundSizeInMeasure, // E025
  PolarityViolation,    // E026
  Internal,             // E029
};

const char* errorCodeName(ErrorCode c);   // "E023"
ErrorCode errorCodeFromName(const std::string& name);

struct Diag {
  ErrorCode code;
  Span span;
  std::string message;
};

// `file:line:col: [Ennn] message` plus a two-line source excerpt.
std::string formatDiag(const Diag& d, const std::string& file, const std::string& source);

} // namespace sizedlang
