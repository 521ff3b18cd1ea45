#include "pal/future.hpp"

#include <chrono>

namespace pal {

void FutureCell::fill(Value v) {
  std::lock_guard lock(m_);
  if (state_.load(std::memory_order_relaxed) != kEmpty)
    throw std::logic_error("future filled twice");
  value_ = std::move(v);
  state_.store(kFilled, std::memory_order_release);
  cv_.notify_all();
}

void FutureCell::fail(TrapInfo trap) {
  std::lock_guard lock(m_);
  if (state_.load(std::memory_order_relaxed) != kEmpty)
    throw std::logic_error("future filled twice");
  trap_ = std::move(trap);
  state_.store(kFailed, std::memory_order_release);
  cv_.notify_all();
}

Value FutureCell::wait(const std::atomic<bool>* abort) {
  int s = state_.load(std::memory_order_acquire);
  if (s == kEmpty) {
    std::unique_lock lock(m_);
    // Poll the abort flag while empty; a fill/fail notifies immediately.
    while (state_.load(std::memory_order_acquire) == kEmpty) {
      if (abort && abort->load(std::memory_order_acquire)) throw DeadlockError();
      cv_.wait_for(lock, std::chrono::milliseconds(10));
    }
    s = state_.load(std::memory_order_acquire);
  }
  if (s == kFailed) throw TrapError(trap_);
  return value_;
}

std::optional<Value> FutureCell::poll() {
  int s = state_.load(std::memory_order_acquire);
  if (s == kEmpty) return std::nullopt;
  if (s == kFailed) throw TrapError(trap_);
  return value_;
}

FutureRef make_empty_future(const ValueKind& inner) { return std::make_shared<FutureCell>(inner); }

FutureRef make_filled_future(const ValueKind& inner, Value v) {
  auto cell = std::make_shared<FutureCell>(inner);
  cell->fill(std::move(v));
  return cell;
}

}  // namespace pal
