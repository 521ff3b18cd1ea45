#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pal/program.hpp"

namespace pal {

// Builds a method body with symbolic jump labels, resolving them to absolute
// instruction indices at finish(). Slots are referred to by name.
class BodyBuilder {
 public:
  explicit BodyBuilder(const MethodDef& method);

  int label();              // fresh label id
  void place(int label);    // bind a label to the next emitted instruction

  BodyBuilder& emit(Instruction in);
  BodyBuilder& const_i(std::int64_t v);
  BodyBuilder& const_f(double v);
  BodyBuilder& load(const std::string& slot);
  BodyBuilder& store(const std::string& slot);
  BodyBuilder& op(Opcode o);  // operand-free opcodes
  BodyBuilder& jmp(int label);
  BodyBuilder& jz(int label);
  BodyBuilder& call(const std::string& method, std::int64_t argc);
  BodyBuilder& newarr(const ValueKind& elem);
  BodyBuilder& getstatic(const std::string& name);
  BodyBuilder& putstatic(const std::string& name);

  // Resolves labels and returns the body. Throws std::logic_error on an
  // unplaced label.
  std::vector<Instruction> finish();

 private:
  std::int64_t slot_index(const std::string& name) const;

  std::map<std::string, std::int64_t> slots_;
  std::vector<Instruction> code_;
  std::vector<int> pending_;           // instruction -> label id (or -1)
  std::vector<std::int64_t> targets_;  // label id -> instruction index
};

}  // namespace pal
