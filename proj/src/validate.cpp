#include "pal/validate.hpp"

#include <set>
#include <string>

namespace pal {

namespace {

Diagnostic make(std::string_view code, std::string method, std::int64_t index, std::string msg) {
  Diagnostic d;
  d.severity = Severity::Error;
  d.code = std::string(code);
  d.method = std::move(method);
  d.instruction_index = index;
  d.message = std::move(msg);
  return d;
}

}  // namespace

std::vector<Diagnostic> validate_program(const Program& program) {
  std::vector<Diagnostic> diags;

  std::set<std::string> seen;
  for (const auto& m : program.methods) {
    if (!seen.insert(m.name).second)
      diags.push_back(make(codes::DuplicateMethod, m.name, -1,
                           "method '" + m.name + "' is defined more than once"));
  }

  const MethodDef* entry = program.find_method(program.entry);
  if (entry == nullptr) {
    diags.push_back(make(codes::MissingEntry, program.entry, -1,
                         "entry method '" + program.entry + "' is not defined"));
  } else if (!entry->params.empty()) {
    diags.push_back(make(codes::EntryHasParams, entry->name, -1,
                         "entry method '" + entry->name + "' must take no parameters"));
  }

  for (const auto& m : program.methods) {
    const auto body_size = static_cast<std::int64_t>(m.body.size());
    const auto slot_count = static_cast<std::int64_t>(m.slot_count());
    for (std::int64_t i = 0; i < body_size; ++i) {
      const Instruction& in = m.body[static_cast<std::size_t>(i)];
      switch (in.op) {
        case Opcode::JMP:
        case Opcode::JZ:
          if (in.int_operand < 0 || in.int_operand >= body_size)
            diags.push_back(make(codes::InvalidJumpTarget, m.name, i,
                                 "jump to " + std::to_string(in.int_operand) + " is outside [0, " +
                                     std::to_string(body_size) + ")"));
          break;
        case Opcode::LOAD:
        case Opcode::STORE:
          if (in.int_operand < 0 || in.int_operand >= slot_count)
            diags.push_back(make(codes::InvalidSlot, m.name, i,
                                 "slot " + std::to_string(in.int_operand) + " is outside [0, " +
                                     std::to_string(slot_count) + ")"));
          break;
        case Opcode::SPAWN:
          if (!program.transformed)
            diags.push_back(make(codes::SpawnInUntransformed, m.name, i,
                                 "SPAWN is only valid in a transformed program"));
          [[fallthrough]];
        case Opcode::CALL: {
          const MethodDef* target = program.find_method(in.name);
          if (target == nullptr) {
            diags.push_back(make(codes::UnknownCallTarget, m.name, i,
                                 "call to undefined method '" + in.name + "'"));
          } else if (in.int_operand != static_cast<std::int64_t>(target->params.size())) {
            diags.push_back(make(codes::CallArityMismatch, m.name, i,
                                 "'" + in.name + "' takes " +
                                     std::to_string(target->params.size()) +
                                     " argument(s), call site provides " +
                                     std::to_string(in.int_operand)));
          }
          break;
        }
        default:
          break;
      }
    }
  }
  return diags;
}

}  // namespace pal
