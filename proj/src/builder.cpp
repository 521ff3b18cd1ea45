#include "pal/builder.hpp"

#include <stdexcept>

namespace pal {

BodyBuilder::BodyBuilder(const MethodDef& method) {
  for (std::size_t i = 0; i < method.slot_count(); ++i)
    slots_[method.slot(i).name] = static_cast<std::int64_t>(i);
}

int BodyBuilder::label() {
  targets_.push_back(-1);
  return static_cast<int>(targets_.size()) - 1;
}

void BodyBuilder::place(int label) {
  if (label < 0 || label >= static_cast<int>(targets_.size()))
    throw std::logic_error("BodyBuilder: unknown label");
  if (targets_[static_cast<std::size_t>(label)] != -1)
    throw std::logic_error("BodyBuilder: label placed twice");
  targets_[static_cast<std::size_t>(label)] = static_cast<std::int64_t>(code_.size());
}

BodyBuilder& BodyBuilder::emit(Instruction in) {
  code_.push_back(std::move(in));
  pending_.push_back(-1);
  return *this;
}

BodyBuilder& BodyBuilder::const_i(std::int64_t v) { return emit(Instruction::const_i(v)); }
BodyBuilder& BodyBuilder::const_f(double v) { return emit(Instruction::const_f(v)); }

BodyBuilder& BodyBuilder::load(const std::string& slot) {
  return emit(Instruction::load(slot_index(slot)));
}

BodyBuilder& BodyBuilder::store(const std::string& slot) {
  return emit(Instruction::store(slot_index(slot)));
}

BodyBuilder& BodyBuilder::op(Opcode opcode) { return emit(Instruction::simple(opcode)); }

BodyBuilder& BodyBuilder::jmp(int label) {
  emit(Instruction::jmp(0));
  pending_.back() = label;
  return *this;
}

BodyBuilder& BodyBuilder::jz(int label) {
  emit(Instruction::jz(0));
  pending_.back() = label;
  return *this;
}

BodyBuilder& BodyBuilder::call(const std::string& method, std::int64_t argc) {
  return emit(Instruction::call(method, argc));
}

BodyBuilder& BodyBuilder::newarr(const ValueKind& elem) { return emit(Instruction::newarr(elem)); }

BodyBuilder& BodyBuilder::getstatic(const std::string& name) {
  return emit(Instruction::getstatic(name));
}

BodyBuilder& BodyBuilder::putstatic(const std::string& name) {
  return emit(Instruction::putstatic(name));
}

std::vector<Instruction> BodyBuilder::finish() {
  for (std::size_t i = 0; i < code_.size(); ++i) {
    int label = pending_[i];
    if (label < 0) continue;
    std::int64_t target = targets_.at(static_cast<std::size_t>(label));
    if (target < 0) throw std::logic_error("BodyBuilder: jump to unplaced label");
    code_[i].int_operand = target;
  }
  return std::move(code_);
}

std::int64_t BodyBuilder::slot_index(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::logic_error("BodyBuilder: unknown slot '" + name + "'");
  return it->second;
}

}  // namespace pal
