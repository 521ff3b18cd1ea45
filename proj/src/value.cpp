#include "pal/value.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "pal/future.hpp"

namespace pal {

Value make_array(const ValueKind& elem, std::size_t n) {
  auto arr = std::make_shared<ArrayValue>();
  arr->elem = elem;
  arr->items.assign(n, default_value(elem));
  return Value::of_array(std::move(arr));
}

ValueKind kind_of(const Value& v) {
  if (v.is_int()) return kind_int();
  if (v.is_float()) return kind_float();
  if (v.is_bool()) return kind_bool();
  if (v.is_array()) return array_of(v.as_array()->elem);
  return future_of(v.as_future()->inner_kind());
}

bool matches(const Value& v, const ValueKind& k) {
  switch (k.tag) {
    case ValueKind::Tag::Int: return v.is_int();
    case ValueKind::Tag::Float: return v.is_float();
    case ValueKind::Tag::Bool: return v.is_bool();
    case ValueKind::Tag::Array: return v.is_array() && v.as_array()->elem == *k.elem;
    case ValueKind::Tag::Future: return v.is_future() && v.as_future()->inner_kind() == *k.elem;
    case ValueKind::Tag::Void: return false;
  }
  return false;
}

Value default_value(const ValueKind& k) {
  switch (k.tag) {
    case ValueKind::Tag::Int: return Value::of_int(0);
    case ValueKind::Tag::Float: return Value::of_float(0.0);
    case ValueKind::Tag::Bool: return Value::of_bool(false);
    case ValueKind::Tag::Array: return make_array(*k.elem, 0);
    case ValueKind::Tag::Future:
      // An untouched FutureOf slot reads as an already-filled default so
      // TOUCH stays total.
      return Value::of_future(make_filled_future(*k.elem, default_value(*k.elem)));
    case ValueKind::Tag::Void: break;
  }
  throw std::invalid_argument("no value of kind Void");
}

bool deep_equal(const Value& a, const Value& b) {
  if (a.v.index() != b.v.index()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  if (a.is_float())
    return std::bit_cast<std::uint64_t>(a.as_float()) == std::bit_cast<std::uint64_t>(b.as_float());
  if (a.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_array()) {
    const auto& x = *a.as_array();
    const auto& y = *b.as_array();
    if (x.elem != y.elem || x.items.size() != y.items.size()) return false;
    for (std::size_t i = 0; i < x.items.size(); ++i)
      if (!deep_equal(x.items[i], y.items[i])) return false;
    return true;
  }
  return a.as_future() == b.as_future();
}

Value deep_copy(const Value& v) {
  if (!v.is_array()) return v;
  const auto& src = *v.as_array();
  auto arr = std::make_shared<ArrayValue>();
  arr->elem = src.elem;
  arr->items.reserve(src.items.size());
  for (const auto& item : src.items) arr->items.push_back(deep_copy(item));
  return Value::of_array(std::move(arr));
}

bool contains_future(const Value& v) {
  if (v.is_future()) return true;
  if (!v.is_array()) return false;
  for (const auto& item : v.as_array()->items)
    if (contains_future(item)) return true;
  return false;
}

Value deep_reify(const Value& v) {
  if (v.is_future()) return deep_reify(v.as_future()->wait());
  if (!v.is_array()) return v;
  const auto& src = *v.as_array();
  auto arr = std::make_shared<ArrayValue>();
  arr->elem = src.elem;
  arr->items.reserve(src.items.size());
  for (const auto& item : src.items) arr->items.push_back(deep_reify(item));
  return Value::of_array(std::move(arr));
}

namespace {

void append(std::string& out, const Value& v) {
  char buf[64];
  if (v.is_int()) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.as_int());
    out.append(buf, p);
  } else if (v.is_float()) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.as_float());
    out.append(buf, p);
  } else if (v.is_bool()) {
    out += v.as_bool() ? "true" : "false";
  } else if (v.is_array()) {
    out += '[';
    const auto& items = v.as_array()->items;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      append(out, items[i]);
    }
    out += ']';
  } else {
    append(out, deep_reify(v));
  }
}

}  // namespace

std::string value_to_string(const Value& v) {
  std::string out;
  append(out, v);
  return out;
}

}  // namespace pal
