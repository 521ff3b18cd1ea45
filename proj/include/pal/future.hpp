#pragma once

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <optional>

#include "pal/traps.hpp"
#include "pal/value.hpp"

namespace pal {

// Single-assignment result cell with blocking read. Exactly one of fill()
// or fail() happens, once; afterwards wait() is wait-free (an acquire load).
class FutureCell {
 public:
  explicit FutureCell(ValueKind inner) : inner_(std::move(inner)) {}

  const ValueKind& inner_kind() const { return inner_; }

  void fill(Value v);        // throws std::logic_error on a second assignment
  void fail(TrapInfo trap);  // ditto

  bool ready() const { return state_.load(std::memory_order_acquire) != kEmpty; }

  // Blocks until filled or failed. A stored trap is rethrown as TrapError.
  // While blocked, `abort` (when given) is polled; once it becomes true the
  // wait gives up and throws DeadlockError.
  Value wait(const std::atomic<bool>* abort = nullptr);

  // Value if filled, nullopt while empty. Throws the stored trap if failed.
  std::optional<Value> poll();

 private:
  static constexpr int kEmpty = 0, kFilled = 1, kFailed = 2;

  ValueKind inner_;
  std::atomic<int> state_{kEmpty};
  Value value_;
  TrapInfo trap_;
  std::mutex m_;
  std::condition_variable cv_;
};

FutureRef make_empty_future(const ValueKind& inner);
FutureRef make_filled_future(const ValueKind& inner, Value v);

}  // namespace pal
