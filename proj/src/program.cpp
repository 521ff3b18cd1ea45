#include "pal/program.hpp"

#include <bit>

namespace pal {

const char* mnemonic(Opcode op) {
  switch (op) {
    case Opcode::CONST_I: return "CONST_I";
    case Opcode::CONST_F: return "CONST_F";
    case Opcode::LOAD: return "LOAD";
    case Opcode::STORE: return "STORE";
    case Opcode::ADD: return "ADD";
    case Opcode::SUB: return "SUB";
    case Opcode::MUL: return "MUL";
    case Opcode::DIV: return "DIV";
    case Opcode::NEG: return "NEG";
    case Opcode::CMP_LT: return "CMP_LT";
    case Opcode::CMP_EQ: return "CMP_EQ";
    case Opcode::JMP: return "JMP";
    case Opcode::JZ: return "JZ";
    case Opcode::CALL: return "CALL";
    case Opcode::SPAWN: return "SPAWN";
    case Opcode::TOUCH: return "TOUCH";
    case Opcode::NEWARR: return "NEWARR";
    case Opcode::ALOAD: return "ALOAD";
    case Opcode::ASTORE: return "ASTORE";
    case Opcode::ALEN: return "ALEN";
    case Opcode::GETSTATIC: return "GETSTATIC";
    case Opcode::PUTSTATIC: return "PUTSTATIC";
    case Opcode::RET: return "RET";
    case Opcode::HALT: return "HALT";
  }
  return "?";
}

Instruction Instruction::const_i(std::int64_t v) {
  Instruction in;
  in.op = Opcode::CONST_I;
  in.int_operand = v;
  return in;
}

Instruction Instruction::const_f(double v) {
  Instruction in;
  in.op = Opcode::CONST_F;
  in.float_operand = v;
  return in;
}

Instruction Instruction::load(std::int64_t slot) {
  Instruction in;
  in.op = Opcode::LOAD;
  in.int_operand = slot;
  return in;
}

Instruction Instruction::store(std::int64_t slot) {
  Instruction in;
  in.op = Opcode::STORE;
  in.int_operand = slot;
  return in;
}

Instruction Instruction::simple(Opcode op) {
  Instruction in;
  in.op = op;
  return in;
}

Instruction Instruction::jmp(std::int64_t target) {
  Instruction in;
  in.op = Opcode::JMP;
  in.int_operand = target;
  return in;
}

Instruction Instruction::jz(std::int64_t target) {
  Instruction in;
  in.op = Opcode::JZ;
  in.int_operand = target;
  return in;
}

Instruction Instruction::call(std::string method, std::int64_t argc) {
  Instruction in;
  in.op = Opcode::CALL;
  in.name = std::move(method);
  in.int_operand = argc;
  return in;
}

Instruction Instruction::spawn(std::string method, std::int64_t argc) {
  Instruction in;
  in.op = Opcode::SPAWN;
  in.name = std::move(method);
  in.int_operand = argc;
  return in;
}

Instruction Instruction::newarr(ValueKind elem) {
  Instruction in;
  in.op = Opcode::NEWARR;
  in.kind = std::move(elem);
  return in;
}

Instruction Instruction::getstatic(std::string name) {
  Instruction in;
  in.op = Opcode::GETSTATIC;
  in.name = std::move(name);
  return in;
}

Instruction Instruction::putstatic(std::string name) {
  Instruction in;
  in.op = Opcode::PUTSTATIC;
  in.name = std::move(name);
  return in;
}

bool operator==(const Instruction& a, const Instruction& b) {
  return a.op == b.op && a.int_operand == b.int_operand &&
         std::bit_cast<std::uint64_t>(a.float_operand) ==
             std::bit_cast<std::uint64_t>(b.float_operand) &&
         a.name == b.name && a.kind == b.kind;
}

bool operator==(const MethodDef& a, const MethodDef& b) {
  return a.name == b.name && a.params == b.params && a.locals == b.locals &&
         a.return_kind == b.return_kind && a.body == b.body && a.annotation == b.annotation;
}

const MethodDef* Program::find_method(const std::string& method_name) const {
  for (const auto& m : methods)
    if (m.name == method_name) return &m;
  return nullptr;
}

int Program::method_index(const std::string& method_name) const {
  for (std::size_t i = 0; i < methods.size(); ++i)
    if (methods[i].name == method_name) return static_cast<int>(i);
  return -1;
}

bool operator==(const Program& a, const Program& b) {
  return a.name == b.name && a.entry == b.entry && a.transformed == b.transformed &&
         a.methods == b.methods;
}

}  // namespace pal
