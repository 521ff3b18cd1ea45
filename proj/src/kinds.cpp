#include "pal/kinds.hpp"

namespace pal {

namespace {

ValueKind scalar(ValueKind::Tag t) {
  ValueKind k;
  k.tag = t;
  return k;
}

}  // namespace

ValueKind kind_int() { return scalar(ValueKind::Tag::Int); }
ValueKind kind_float() { return scalar(ValueKind::Tag::Float); }
ValueKind kind_bool() { return scalar(ValueKind::Tag::Bool); }
ValueKind kind_void() { return scalar(ValueKind::Tag::Void); }

ValueKind array_of(const ValueKind& elem) {
  if (elem.is_void()) throw std::invalid_argument("ArrayOf(Void) is not a kind");
  ValueKind k;
  k.tag = ValueKind::Tag::Array;
  k.elem = std::make_shared<ValueKind>(elem);
  return k;
}

ValueKind future_of(const ValueKind& inner) {
  if (inner.is_void()) throw std::invalid_argument("FutureOf(Void) is not a kind");
  if (inner.is_future()) throw std::invalid_argument("FutureOf may not be nested");
  ValueKind k;
  k.tag = ValueKind::Tag::Future;
  k.elem = std::make_shared<ValueKind>(inner);
  return k;
}

bool operator==(const ValueKind& a, const ValueKind& b) {
  if (a.tag != b.tag) return false;
  if (!a.elem && !b.elem) return true;
  if (!a.elem || !b.elem) return false;
  return *a.elem == *b.elem;
}

std::string to_string(const ValueKind& k) {
  switch (k.tag) {
    case ValueKind::Tag::Int: return "Int";
    case ValueKind::Tag::Float: return "Float";
    case ValueKind::Tag::Bool: return "Bool";
    case ValueKind::Tag::Void: return "Void";
    case ValueKind::Tag::Array: return "ArrayOf(" + to_string(*k.elem) + ")";
    case ValueKind::Tag::Future: return "FutureOf(" + to_string(*k.elem) + ")";
  }
  return "?";
}

bool is_plain_data(const ValueKind& k) {
  switch (k.tag) {
    case ValueKind::Tag::Int:
    case ValueKind::Tag::Float:
    case ValueKind::Tag::Bool:
      return true;
    case ValueKind::Tag::Array:
      return is_plain_data(*k.elem);
    default:
      return false;
  }
}

}  // namespace pal
