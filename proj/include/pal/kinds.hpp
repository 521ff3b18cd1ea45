#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace pal {

// Value kinds of the IL. Array and Future kinds carry an element kind;
// futures may not nest (FutureOf(FutureOf(_)) is rejected at construction).
struct ValueKind {
  enum class Tag : std::uint8_t { Int, Float, Bool, Array, Future, Void };

  Tag tag = Tag::Void;
  std::shared_ptr<const ValueKind> elem;  // set for Array and Future

  bool is_int() const { return tag == Tag::Int; }
  bool is_float() const { return tag == Tag::Float; }
  bool is_bool() const { return tag == Tag::Bool; }
  bool is_array() const { return tag == Tag::Array; }
  bool is_future() const { return tag == Tag::Future; }
  bool is_void() const { return tag == Tag::Void; }

  const ValueKind& element() const { return *elem; }
};

ValueKind kind_int();
ValueKind kind_float();
ValueKind kind_bool();
ValueKind kind_void();
ValueKind array_of(const ValueKind& elem);   // throws std::invalid_argument on Void
ValueKind future_of(const ValueKind& inner); // throws on Void or Future inner

bool operator==(const ValueKind& a, const ValueKind& b);
inline bool operator!=(const ValueKind& a, const ValueKind& b) { return !(a == b); }

std::string to_string(const ValueKind& k);

// Int, Float, Bool, or arrays of those: the argument kinds an annotated
// method may declare.
bool is_plain_data(const ValueKind& k);

}  // namespace pal
