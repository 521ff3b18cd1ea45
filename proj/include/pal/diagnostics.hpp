#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pal {

enum class Severity { Error, Warning };

// One finding from the parser, validator, or verifier. Parser diagnostics
// carry line/column; validator and verifier diagnostics carry method and
// (where applicable) instruction index.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string method;
  int instruction_index = -1;
  int line = 0;
  int column = 0;
  std::string message;
};

// "SEVERITY CODE method[#idx]: message" (the CLI's one-per-line format);
// parser diagnostics render the line:column position instead of a method.
std::string format_diagnostic(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags);

namespace codes {

// parser
inline constexpr std::string_view SyntaxError = "SyntaxError";
inline constexpr std::string_view ResolutionError = "ResolutionError";
inline constexpr std::string_view RestrictedOpcode = "RestrictedOpcode";

// validator
inline constexpr std::string_view DuplicateMethod = "DuplicateMethod";
inline constexpr std::string_view MissingEntry = "MissingEntry";
inline constexpr std::string_view EntryHasParams = "EntryHasParams";
inline constexpr std::string_view UnknownCallTarget = "UnknownCallTarget";
inline constexpr std::string_view CallArityMismatch = "CallArityMismatch";
inline constexpr std::string_view InvalidJumpTarget = "InvalidJumpTarget";
inline constexpr std::string_view InvalidSlot = "InvalidSlot";
inline constexpr std::string_view SpawnInUntransformed = "SpawnInUntransformed";

// verifier
inline constexpr std::string_view FieldAccessInParallel = "FieldAccessInParallel";
inline constexpr std::string_view MissingFutureReturn = "MissingFutureReturn";
inline constexpr std::string_view BadParDegree = "BadParDegree";
inline constexpr std::string_view NestedParallelCall = "NestedParallelCall";
inline constexpr std::string_view RestrictedParamKind = "RestrictedParamKind";
inline constexpr std::string_view UnusedFutureReturn = "UnusedFutureReturn";

}  // namespace codes

}  // namespace pal
