#include "pal/diagnostics.hpp"

#include "pal/traps.hpp"

namespace pal {

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = d.severity == Severity::Error ? "ERROR " : "WARNING ";
  out += d.code;
  out += ' ';
  if (!d.method.empty()) {
    out += d.method;
    if (d.instruction_index >= 0) {
      out += '#';
      out += std::to_string(d.instruction_index);
    }
  } else {
    out += std::to_string(d.line);
    out += ':';
    out += std::to_string(d.column);
  }
  out += ": ";
  out += d.message;
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

std::string to_string(TrapKind k) {
  switch (k) {
    case TrapKind::DivideByZero: return "DivideByZero";
    case TrapKind::OutOfBoundsArray: return "OutOfBoundsArray";
    case TrapKind::TypeMismatch: return "TypeMismatch";
    case TrapKind::StackUnderflow: return "StackUnderflow";
  }
  return "?";
}

std::string format_trap(const TrapInfo& t) {
  std::string out = "trap " + to_string(t.kind) + " at " + t.method;
  if (t.instruction_index >= 0) out += "#" + std::to_string(t.instruction_index);
  if (!t.message.empty()) out += ": " + t.message;
  return out;
}

TrapError::TrapError(TrapInfo info) : std::runtime_error(format_trap(info)), info_(std::move(info)) {}

TrapError::TrapError(TrapInfo info, std::string touch_method, int touch_index)
    : std::runtime_error(format_trap(info) + " (raised at touch in " + touch_method + "#" +
                         std::to_string(touch_index) + ")"),
      info_(std::move(info)),
      raised_at_touch_(true),
      touch_method_(std::move(touch_method)),
      touch_index_(touch_index) {}

}  // namespace pal
