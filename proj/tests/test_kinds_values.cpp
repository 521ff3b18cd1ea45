#include <doctest.h>

#include <stdexcept>

#include "pal/future.hpp"
#include "pal/kinds.hpp"
#include "pal/value.hpp"

using namespace pal;

TEST_CASE("kind factories and printing") {
  CHECK(to_string(kind_int()) == "Int");
  CHECK(to_string(kind_float()) == "Float");
  CHECK(to_string(kind_bool()) == "Bool");
  CHECK(to_string(kind_void()) == "Void");
  CHECK(to_string(array_of(kind_int())) == "ArrayOf(Int)");
  CHECK(to_string(future_of(array_of(kind_float()))) == "FutureOf(ArrayOf(Float))");
  CHECK(to_string(array_of(array_of(kind_bool()))) == "ArrayOf(ArrayOf(Bool))");
}

TEST_CASE("kind grammar restrictions") {
  CHECK_THROWS_AS(future_of(future_of(kind_int())), std::invalid_argument);
  CHECK_THROWS_AS(future_of(kind_void()), std::invalid_argument);
  CHECK_THROWS_AS(array_of(kind_void()), std::invalid_argument);
  // Arrays of futures are allowed; futures of arrays are allowed.
  CHECK(array_of(future_of(kind_int())).is_array());
  CHECK(future_of(array_of(kind_int())).is_future());
}

TEST_CASE("kind equality is structural") {
  CHECK(array_of(kind_int()) == array_of(kind_int()));
  CHECK(future_of(kind_int()) != future_of(kind_float()));
  CHECK(kind_int() != kind_void());
  CHECK(array_of(future_of(kind_int())) == array_of(future_of(kind_int())));
}

TEST_CASE("plain-data predicate") {
  CHECK(is_plain_data(kind_int()));
  CHECK(is_plain_data(kind_float()));
  CHECK(is_plain_data(kind_bool()));
  CHECK(is_plain_data(array_of(kind_int())));
  CHECK(is_plain_data(array_of(array_of(kind_float()))));
  CHECK_FALSE(is_plain_data(future_of(kind_int())));
  CHECK_FALSE(is_plain_data(array_of(future_of(kind_int()))));
  CHECK_FALSE(is_plain_data(kind_void()));
}

TEST_CASE("default values") {
  CHECK(default_value(kind_int()).as_int() == 0);
  CHECK(default_value(kind_float()).as_float() == 0.0);
  CHECK(default_value(kind_bool()).as_bool() == false);
  CHECK(default_value(array_of(kind_int())).as_array()->items.empty());
  SUBCASE("future default is pre-filled so TOUCH never blocks on it") {
    Value v = default_value(future_of(kind_int()));
    REQUIRE(v.is_future());
    CHECK(v.as_future()->ready());
    CHECK(v.as_future()->wait().as_int() == 0);
  }
  CHECK_THROWS_AS(default_value(kind_void()), std::invalid_argument);
}

TEST_CASE("matches checks dynamic kinds") {
  CHECK(matches(Value::of_int(3), kind_int()));
  CHECK_FALSE(matches(Value::of_int(3), kind_float()));
  CHECK(matches(make_array(kind_int(), 2), array_of(kind_int())));
  CHECK_FALSE(matches(make_array(kind_int(), 2), array_of(kind_float())));
  CHECK(matches(Value::of_future(make_filled_future(kind_int(), Value::of_int(1))),
                future_of(kind_int())));
  CHECK_FALSE(matches(Value::of_future(make_filled_future(kind_int(), Value::of_int(1))),
                      future_of(kind_float())));
}

TEST_CASE("deep_equal compares structure; floats bitwise") {
  CHECK(deep_equal(Value::of_int(5), Value::of_int(5)));
  CHECK_FALSE(deep_equal(Value::of_int(5), Value::of_float(5.0)));
  CHECK(deep_equal(Value::of_float(0.1), Value::of_float(0.1)));
  CHECK_FALSE(deep_equal(Value::of_float(0.0), Value::of_float(-0.0)));  // bitwise
  Value a = make_array(kind_int(), 3);
  Value b = make_array(kind_int(), 3);
  CHECK(deep_equal(a, b));
  b.as_array()->items[1] = Value::of_int(9);
  CHECK_FALSE(deep_equal(a, b));
}

TEST_CASE("deep_copy severs array aliasing at every level") {
  Value inner = make_array(kind_int(), 2);
  Value outer = make_array(array_of(kind_int()), 1);
  outer.as_array()->items[0] = inner;
  Value copy = deep_copy(outer);
  inner.as_array()->items[0] = Value::of_int(42);
  CHECK(copy.as_array()->items[0].as_array()->items[0].as_int() == 0);
  CHECK(outer.as_array()->items[0].as_array()->items[0].as_int() == 42);
}

TEST_CASE("contains_future looks through arrays") {
  CHECK_FALSE(contains_future(Value::of_int(1)));
  Value arr = make_array(future_of(kind_int()), 1);
  CHECK(contains_future(arr));
  CHECK(contains_future(Value::of_future(make_filled_future(kind_int(), Value::of_int(0)))));
  CHECK_FALSE(contains_future(make_array(kind_float(), 4)));
}

TEST_CASE("value_to_string renders scalars, arrays, and reified futures") {
  CHECK(value_to_string(Value::of_int(-7)) == "-7");
  CHECK(value_to_string(Value::of_bool(true)) == "true");
  Value arr = make_array(kind_int(), 3);
  arr.as_array()->items[2] = Value::of_int(5);
  CHECK(value_to_string(arr) == "[0 0 5]");
  Value fut = Value::of_future(make_filled_future(kind_int(), Value::of_int(12)));
  CHECK(value_to_string(fut) == "12");
}
