#pragma once

#include <stdexcept>
#include <string>

namespace pal {

enum class TrapKind { DivideByZero, OutOfBoundsArray, TypeMismatch, StackUnderflow };

std::string to_string(TrapKind k);

struct TrapInfo {
  TrapKind kind = TrapKind::TypeMismatch;
  std::string method;
  int instruction_index = -1;
  std::string message;
};

std::string format_trap(const TrapInfo& t);

// Raised by the interpreter when an instruction traps. A trap inside a
// spawned task is stored in its future and rethrown at the touch site with
// raised_at_touch set; touch_method/touch_index then locate that site.
class TrapError : public std::runtime_error {
 public:
  explicit TrapError(TrapInfo info);
  TrapError(TrapInfo info, std::string touch_method, int touch_index);

  const TrapInfo& info() const { return info_; }
  bool raised_at_touch() const { return raised_at_touch_; }
  const std::string& touch_method() const { return touch_method_; }
  int touch_index() const { return touch_index_; }

 private:
  TrapInfo info_;
  bool raised_at_touch_ = false;
  std::string touch_method_;
  int touch_index_ = -1;
};

// All runnable threads of control are blocked on futures no one can fill.
class DeadlockError : public std::runtime_error {
 public:
  DeadlockError() : std::runtime_error("deadlock detected: every thread of control is blocked in TOUCH") {}
};

}  // namespace pal
