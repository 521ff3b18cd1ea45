#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pal/kinds.hpp"

namespace pal {

class FutureCell;
struct ArrayValue;

using ArrayRef = std::shared_ptr<ArrayValue>;
using FutureRef = std::shared_ptr<FutureCell>;

// A runtime value. Arrays and futures have reference semantics; scalars are
// plain. 16 bytes of variant payload keeps the interpreter's stack traffic
// cheap.
struct Value {
  std::variant<std::int64_t, double, bool, ArrayRef, FutureRef> v;

  Value() : v(std::int64_t{0}) {}

  static Value of_int(std::int64_t i) {
    Value x;
    x.v.emplace<std::int64_t>(i);
    return x;
  }
  static Value of_float(double f) {
    Value x;
    x.v.emplace<double>(f);
    return x;
  }
  static Value of_bool(bool b) {
    Value x;
    x.v.emplace<bool>(b);
    return x;
  }
  static Value of_array(ArrayRef a) {
    Value x;
    x.v.emplace<ArrayRef>(std::move(a));
    return x;
  }
  static Value of_future(FutureRef f) {
    Value x;
    x.v.emplace<FutureRef>(std::move(f));
    return x;
  }

  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<ArrayRef>(v); }
  bool is_future() const { return std::holds_alternative<FutureRef>(v); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  double as_float() const { return std::get<double>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const ArrayRef& as_array() const { return std::get<ArrayRef>(v); }
  const FutureRef& as_future() const { return std::get<FutureRef>(v); }
};

struct ArrayValue {
  ValueKind elem;
  std::vector<Value> items;
};

Value make_array(const ValueKind& elem, std::size_t n);  // default-filled

ValueKind kind_of(const Value& v);
bool matches(const Value& v, const ValueKind& k);

// Default per kind: 0, 0.0, false, empty array, or an already-filled future
// of the inner kind's default.
Value default_value(const ValueKind& k);

// Structural equality. Floats compare bitwise; arrays compare element kind
// and items; futures compare by cell identity.
bool deep_equal(const Value& a, const Value& b);

// Copy with fresh array storage at every level. Future references are kept
// as-is (spawn rejects future arguments before copying).
Value deep_copy(const Value& v);

bool contains_future(const Value& v);

// Replace every future (recursively, inside arrays too) with its value,
// blocking until filled. Rethrows a stored task trap.
Value deep_reify(const Value& v);

// Rendering used by the CLI for program results: futures are reified first.
std::string value_to_string(const Value& v);

}  // namespace pal
