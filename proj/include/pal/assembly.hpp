#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pal/diagnostics.hpp"
#include "pal/program.hpp"

namespace pal {

struct ParseOptions {
  // Accept the "#transformed" first-line marker (and with it SPAWN). Files
  // written by the transformer need this; hand-written sources never do.
  bool trusted = false;
};

class AssemblyError : public std::runtime_error {
 public:
  explicit AssemblyError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Parses textual IL assembly. Throws AssemblyError carrying every collected
// diagnostic (each with line/column); never returns a partial program.
Program parse_assembly(std::string_view text, const ParseOptions& options = {});

// Canonical text for a program; parse_assembly(emit_assembly(p)) is
// structurally equal to p. Transformed programs start with "#transformed".
std::string emit_assembly(const Program& program);

std::string to_string(const ValueKind& k);  // declared in kinds.hpp; reused by the emitter

}  // namespace pal
