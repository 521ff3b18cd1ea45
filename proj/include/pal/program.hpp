#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pal/kinds.hpp"

namespace pal {

enum class Opcode : std::uint8_t {
  CONST_I, CONST_F,
  LOAD, STORE,
  ADD, SUB, MUL, DIV, NEG,
  CMP_LT, CMP_EQ,
  JMP, JZ,
  CALL, SPAWN,
  TOUCH,
  NEWARR, ALOAD, ASTORE, ALEN,
  GETSTATIC, PUTSTATIC,
  RET, HALT,
};

const char* mnemonic(Opcode op);

// One IL instruction. Which fields are meaningful depends on the opcode:
//   CONST_I           int_operand (value)
//   CONST_F           float_operand
//   LOAD/STORE        int_operand (slot index: params first, then locals)
//   JMP/JZ            int_operand (absolute instruction index)
//   CALL/SPAWN        name (target method), int_operand (argument count)
//   NEWARR            kind (element kind)
//   GETSTATIC/PUTSTATIC  name (global slot)
struct Instruction {
  Opcode op = Opcode::HALT;
  std::int64_t int_operand = 0;
  double float_operand = 0.0;
  std::string name;
  ValueKind kind;

  static Instruction const_i(std::int64_t v);
  static Instruction const_f(double v);
  static Instruction load(std::int64_t slot);
  static Instruction store(std::int64_t slot);
  static Instruction simple(Opcode op);  // operand-free opcodes
  static Instruction jmp(std::int64_t target);
  static Instruction jz(std::int64_t target);
  static Instruction call(std::string method, std::int64_t argc);
  static Instruction spawn(std::string method, std::int64_t argc);
  static Instruction newarr(ValueKind elem);
  static Instruction getstatic(std::string name);
  static Instruction putstatic(std::string name);
};

bool operator==(const Instruction& a, const Instruction& b);
inline bool operator!=(const Instruction& a, const Instruction& b) { return !(a == b); }

struct ParallelAnnotation {
  // Maximum number of processing elements for the method's tasks. Kept as
  // parsed; the verifier rejects values below 1 (BadParDegree).
  std::int64_t par_degree = 1;
};

inline bool operator==(const ParallelAnnotation& a, const ParallelAnnotation& b) {
  return a.par_degree == b.par_degree;
}

struct Slot {
  std::string name;
  ValueKind kind;
};

inline bool operator==(const Slot& a, const Slot& b) { return a.name == b.name && a.kind == b.kind; }

struct MethodDef {
  std::string name;
  std::vector<Slot> params;
  std::vector<Slot> locals;
  ValueKind return_kind = kind_void();
  std::vector<Instruction> body;
  std::optional<ParallelAnnotation> annotation;

  bool annotated() const { return annotation.has_value(); }
  std::size_t slot_count() const { return params.size() + locals.size(); }
  const Slot& slot(std::size_t i) const {
    return i < params.size() ? params[i] : locals[i - params.size()];
  }
};

bool operator==(const MethodDef& a, const MethodDef& b);
inline bool operator!=(const MethodDef& a, const MethodDef& b) { return !(a == b); }

struct Program {
  std::string name = "program";
  std::vector<MethodDef> methods;
  std::string entry = "main";
  bool transformed = false;

  const MethodDef* find_method(const std::string& name) const;
  int method_index(const std::string& name) const;  // -1 when absent
};

bool operator==(const Program& a, const Program& b);
inline bool operator!=(const Program& a, const Program& b) { return !(a == b); }

}  // namespace pal
