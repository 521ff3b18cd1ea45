#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "pal/assembly.hpp"
#include "pal/builder.hpp"
#include "pal/runtime.hpp"
#include "pal/transform.hpp"
#include "support/generator.hpp"

using namespace pal;

namespace {

PlatformInfo cores(int n) {
  PlatformInfo p;
  p.cores = n;
  p.source = PlatformInfo::Source::Overridden;
  return p;
}

RunOutcome run_text(const std::string& text, int ncores = 1, bool trusted = false) {
  ParseOptions opts;
  opts.trusted = trusted;
  return run(parse_assembly(text, opts), cores(ncores));
}

TrapError run_expecting_trap(const std::string& text, int ncores = 1, bool trusted = false) {
  try {
    (void)run_text(text, ncores, trusted);
  } catch (const TrapError& e) {
    return e;
  }
  FAIL("expected TrapError");
  throw std::logic_error("unreachable");
}

std::string wrap_main_int(const std::string& body) {
  return "method main() -> Int {\n" + body + "\n}\n";
}

std::int64_t eval_int(const std::string& body) {
  const RunOutcome out = run_text(wrap_main_int(body));
  REQUIRE(out.value.is_int());
  return out.value.as_int();
}

double eval_float(const std::string& body) {
  const RunOutcome out = run_text("method main() -> Float {\n" + body + "\n}\n");
  REQUIRE(out.value.is_float());
  return out.value.as_float();
}

}  // namespace

TEST_CASE("integer arithmetic wraps around") {
  CHECK(eval_int("CONST_I 9223372036854775807; CONST_I 1; ADD; RET;") == INT64_MIN);
  CHECK(eval_int("CONST_I -9223372036854775808; CONST_I 1; SUB; RET;") == INT64_MAX);
  CHECK(eval_int("CONST_I 4294967296; CONST_I 4294967296; MUL; RET;") == 0);
  CHECK(eval_int("CONST_I -9223372036854775808; NEG; RET;") == INT64_MIN);
  CHECK(eval_int("CONST_I -9223372036854775808; CONST_I -1; DIV; RET;") == INT64_MIN);
  CHECK(eval_int("CONST_I -7; CONST_I 2; DIV; RET;") == -3);  // truncation toward zero
  CHECK(eval_int("CONST_I 41; CONST_I 1; ADD; RET;") == 42);
}

TEST_CASE("integer division by zero traps") {
  const TrapError e =
      run_expecting_trap(wrap_main_int("CONST_I 1; CONST_I 0; DIV; RET;"));
  CHECK(e.info().kind == TrapKind::DivideByZero);
  CHECK(e.info().method == "main");
  CHECK(e.info().instruction_index == 2);
  CHECK_FALSE(e.raised_at_touch());
}

TEST_CASE("float arithmetic follows IEEE semantics and never traps") {
  CHECK(eval_float("CONST_F 1.0; CONST_F 0.0; DIV; RET;") ==
        std::numeric_limits<double>::infinity());
  CHECK(std::isnan(eval_float("CONST_F 0.0; CONST_F 0.0; DIV; RET;")));
  CHECK(eval_float("CONST_F 0.1; CONST_F 0.2; ADD; RET;") == 0.30000000000000004);
  CHECK(eval_float("CONST_F 2.5; NEG; RET;") == -2.5);
}

TEST_CASE("comparisons") {
  CHECK(eval_int("CONST_I 1; CONST_I 2; CMP_LT; JZ 6; CONST_I 10; RET; CONST_I 20; RET;") == 10);
  CHECK(eval_int("CONST_F 3.0; CONST_F 2.0; CMP_LT; JZ 6; CONST_I 10; RET; CONST_I 20; RET;") == 20);
  CHECK(eval_int("CONST_I 5; CONST_I 5; CMP_EQ; JZ 6; CONST_I 1; RET; CONST_I 0; RET;") == 1);

  SUBCASE("NaN compares unequal to itself") {
    const RunOutcome out = run_text("method main() -> Bool {\n  CONST_F nan; CONST_F nan; CMP_EQ; RET;\n}\n");
    REQUIRE(out.value.is_bool());
    CHECK_FALSE(out.value.as_bool());
  }
  SUBCASE("mixed operand kinds trap") {
    const TrapError e = run_expecting_trap(wrap_main_int("CONST_I 1; CONST_F 1.0; CMP_LT; RET;"));
    CHECK(e.info().kind == TrapKind::TypeMismatch);
  }
}

TEST_CASE("JZ accepts Bool or Int and traps on anything else") {
  // Bool false jumps.
  CHECK(eval_int("CONST_I 2; CONST_I 1; CMP_LT; JZ 6; CONST_I 10; RET; CONST_I 20; RET;") == 20);
  // Int zero jumps, nonzero falls through.
  CHECK(eval_int("CONST_I 0; JZ 4; CONST_I 10; RET; CONST_I 20; RET;") == 20);
  CHECK(eval_int("CONST_I 7; JZ 4; CONST_I 10; RET; CONST_I 20; RET;") == 10);
  const TrapError e = run_expecting_trap(wrap_main_int("CONST_F 1.0; JZ 0; CONST_I 1; RET;"));
  CHECK(e.info().kind == TrapKind::TypeMismatch);
  CHECK(e.info().instruction_index == 1);
}

TEST_CASE("mixed-kind arithmetic traps") {
  const TrapError e = run_expecting_trap(wrap_main_int("CONST_I 1; CONST_F 2.0; ADD; RET;"));
  CHECK(e.info().kind == TrapKind::TypeMismatch);
}

TEST_CASE("operating on an empty stack traps") {
  const TrapError e = run_expecting_trap(wrap_main_int("ADD; RET;"));
  CHECK(e.info().kind == TrapKind::StackUnderflow);
}

TEST_CASE("arrays allocate, read, write, and measure") {
  const std::int64_t got = eval_int(
      "  local xs: ArrayOf(Int);\n"
      "  CONST_I 3; NEWARR Int; STORE xs;\n"
      "  LOAD xs; CONST_I 1; CONST_I 40; ASTORE;\n"
      "  LOAD xs; CONST_I 1; ALOAD;\n"
      "  LOAD xs; ALEN; ADD;\n"
      "  LOAD xs; CONST_I 0; ALOAD; ADD;\n"  // untouched element defaults to 0
      "  RET;");
  CHECK(got == 43);
}

TEST_CASE("array bounds are enforced") {
  SUBCASE("read past the end") {
    const TrapError e = run_expecting_trap(wrap_main_int(
        "  local xs: ArrayOf(Int);\n"
        "  CONST_I 2; NEWARR Int; STORE xs;\n"
        "  LOAD xs; CONST_I 2; ALOAD; RET;"));
    CHECK(e.info().kind == TrapKind::OutOfBoundsArray);
  }
  SUBCASE("negative index") {
    const TrapError e = run_expecting_trap(wrap_main_int(
        "  local xs: ArrayOf(Int);\n"
        "  CONST_I 2; NEWARR Int; STORE xs;\n"
        "  LOAD xs; CONST_I -1; CONST_I 0; ASTORE; CONST_I 0; RET;"));
    CHECK(e.info().kind == TrapKind::OutOfBoundsArray);
  }
  SUBCASE("negative length") {
    const TrapError e =
        run_expecting_trap(wrap_main_int("CONST_I -1; NEWARR Int; CONST_I 0; RET;"));
    CHECK(e.info().kind == TrapKind::OutOfBoundsArray);
  }
}

TEST_CASE("array element kind is enforced on store") {
  const TrapError e = run_expecting_trap(wrap_main_int(
      "  local xs: ArrayOf(Int);\n"
      "  CONST_I 1; NEWARR Int; STORE xs;\n"
      "  LOAD xs; CONST_I 0; CONST_F 1.5; ASTORE; CONST_I 0; RET;"));
  CHECK(e.info().kind == TrapKind::TypeMismatch);
}

TEST_CASE("globals default to Int 0 and survive to the outcome") {
  const RunOutcome out = run_text(wrap_main_int(
      "  GETSTATIC counter; CONST_I 5; ADD; PUTSTATIC counter;\n"
      "  GETSTATIC counter; RET;"));
  CHECK(out.value.as_int() == 5);
  REQUIRE(out.globals.count("counter") == 1);
  CHECK(out.globals.at("counter").as_int() == 5);
}

TEST_CASE("a FutureOf local defaults to an already-filled future") {
  CHECK(eval_int("  local f: FutureOf(Int);\n  LOAD f; TOUCH; RET;") == 0);
}

TEST_CASE("TOUCH requires a future") {
  const TrapError e = run_expecting_trap(wrap_main_int("CONST_I 1; TOUCH; RET;"));
  CHECK(e.info().kind == TrapKind::TypeMismatch);
}

TEST_CASE("a CALL to a FutureOf method yields a filled future") {
  const std::int64_t got = run_text(
      "method work(a: Int) -> FutureOf(Int) {\n  LOAD a; CONST_I 2; MUL; RET;\n}\n"
      "method main() -> Int {\n  CONST_I 21; CALL work; TOUCH; RET;\n}\n").value.as_int();
  CHECK(got == 42);
}

TEST_CASE("an annotated method called without transformation still works") {
  const std::int64_t got = run_text(
      "@Parallel(parDegree=4)\n"
      "method work(a: Int) -> FutureOf(Int) {\n  LOAD a; CONST_I 2; MUL; RET;\n}\n"
      "method main() -> Int {\n  CONST_I 21; CALL work; TOUCH; RET;\n}\n").value.as_int();
  CHECK(got == 42);
}

TEST_CASE("returning the wrong kind traps") {
  const TrapError e = run_expecting_trap("method main() -> Int {\n  CONST_F 1.5; RET;\n}\n");
  CHECK(e.info().kind == TrapKind::TypeMismatch);
}

TEST_CASE("falling off the end") {
  SUBCASE("acts as RET for Void methods") {
    CHECK_NOTHROW(run_text("method main() {\n  CONST_I 0;\n}\n"));
  }
  SUBCASE("traps for value-returning methods") {
    const TrapError e = run_expecting_trap(wrap_main_int("CONST_I 0;"));
    CHECK(e.info().kind == TrapKind::StackUnderflow);
  }
}

TEST_CASE("HALT stops the thread of control with the root method's default") {
  SUBCASE("in the entry method") {
    CHECK(eval_int("CONST_I 7; HALT;") == 0);
  }
  SUBCASE("inside a callee it abandons the whole call stack") {
    const std::int64_t got = run_text(
        "method helper() -> Int {\n  HALT;\n}\n"
        "method main() -> Int {\n  CONST_I 5; CALL helper; ADD; RET;\n}\n").value.as_int();
    CHECK(got == 0);
  }
  SUBCASE("inside a task it fills the future with the default") {
    const std::int64_t got = run_text(
        "#transformed\n"
        "@Parallel(parDegree=2)\n"
        "method work() -> FutureOf(Int) {\n  HALT;\n}\n"
        "method main() -> Int {\n  SPAWN work; TOUCH; RET;\n}\n",
        2, /*trusted=*/true).value.as_int();
    CHECK(got == 0);
  }
}

TEST_CASE("SPAWN executes threaded and inline with identical results") {
  const std::string text =
      "#transformed\n"
      "@Parallel(parDegree=2)\n"
      "method work(a: Int) -> FutureOf(Int) {\n  LOAD a; CONST_I 2; MUL; RET;\n}\n"
      "method main() -> Int {\n  CONST_I 21; SPAWN work; TOUCH; RET;\n}\n";
  const RunOutcome threaded = run_text(text, 4, /*trusted=*/true);
  const RunOutcome inline_mode = run_text(text, 1, /*trusted=*/true);
  CHECK(threaded.value.as_int() == 42);
  CHECK(inline_mode.value.as_int() == 42);
  // Inline spawns still count as tasks.
  CHECK(threaded.stats.tasks_spawned == 1);
  CHECK(inline_mode.stats.tasks_spawned == 1);
  CHECK(inline_mode.stats.peak_concurrency == 1);
  CHECK(inline_mode.stats.per_method.at("work").tasks == 1);
}

TEST_CASE("a trap inside a task surfaces at the touch site") {
  const std::string text =
      "#transformed\n"
      "@Parallel(parDegree=2)\n"
      "method work(a: Int) -> FutureOf(Int) {\n  LOAD a; CONST_I 0; DIV; RET;\n}\n"
      "method main() -> Int {\n  CONST_I 1; SPAWN work; TOUCH; RET;\n}\n";
  for (int ncores : {1, 4}) {
    CAPTURE(ncores);
    const TrapError e = run_expecting_trap(text, ncores, /*trusted=*/true);
    CHECK(e.info().kind == TrapKind::DivideByZero);
    CHECK(e.info().method == "work");
    CHECK(e.info().instruction_index == 2);
    CHECK(e.raised_at_touch());
    CHECK(e.touch_method() == "main");
    CHECK(e.touch_index() == 2);
  }
}

TEST_CASE("SPAWN rejects targets that are not annotated future factories") {
  SUBCASE("plain method") {
    const TrapError e = run_expecting_trap(
        "#transformed\n"
        "method plain() -> FutureOf(Int) {\n  CONST_I 1; RET;\n}\n"
        "method main() -> Int {\n  SPAWN plain; TOUCH; RET;\n}\n",
        2, /*trusted=*/true);
    CHECK(e.info().kind == TrapKind::TypeMismatch);
    CHECK(e.info().message.find("not @Parallel") != std::string::npos);
  }
  SUBCASE("annotated method without a future return") {
    const TrapError e = run_expecting_trap(
        "#transformed\n"
        "@Parallel(parDegree=2)\n"
        "method w() -> Int {\n  CONST_I 1; RET;\n}\n"
        "method main() -> Int {\n  SPAWN w; TOUCH; RET;\n}\n",
        2, /*trusted=*/true);
    CHECK(e.info().message.find("FutureOf") != std::string::npos);
  }
}

TEST_CASE("SPAWN rejects arguments containing futures") {
  const TrapError e = run_expecting_trap(
      "#transformed\n"
      "@Parallel(parDegree=2)\n"
      "method work(fs: ArrayOf(FutureOf(Int))) -> FutureOf(Int) {\n  CONST_I 0; RET;\n}\n"
      "method main() -> Int {\n"
      "  local fs: ArrayOf(FutureOf(Int));\n"
      "  CONST_I 1; NEWARR FutureOf(Int); STORE fs;\n"
      "  LOAD fs; SPAWN work; TOUCH; RET;\n"
      "}\n",
      2, /*trusted=*/true);
  CHECK(e.info().kind == TrapKind::TypeMismatch);
  CHECK(e.info().message.find("future") != std::string::npos);
}

TEST_CASE("arguments to annotated methods are deep-copied in both modes") {
  const std::string annotated =
      "@Parallel(parDegree=2)\n"
      "method poke(xs: ArrayOf(Int)) -> FutureOf(Int) {\n"
      "  LOAD xs; CONST_I 0; CONST_I 99; ASTORE;\n"
      "  CONST_I 0; RET;\n"
      "}\n"
      "method main() -> Int {\n"
      "  local xs: ArrayOf(Int);\n"
      "  CONST_I 1; NEWARR Int; STORE xs;\n"
      "  LOAD xs; CONST_I 0; CONST_I 5; ASTORE;\n"
      "  LOAD xs; CALL poke; TOUCH;\n"
      "  LOAD xs; CONST_I 0; ALOAD; ADD;\n"
      "  RET;\n"
      "}\n";
  SUBCASE("CALL mode: callee mutates only its copy") {
    CHECK(run_text(annotated).value.as_int() == 5);
  }
  SUBCASE("SPAWN mode: task mutates only its copy") {
    const TransformResult r = transform(parse_assembly(annotated), cores(4));
    REQUIRE(r.report.rewritten_sites.size() == 1);
    CHECK(run(r.program, cores(4)).value.as_int() == 5);
  }
  SUBCASE("non-annotated calls share the array by reference") {
    const std::string shared =
        "method poke(xs: ArrayOf(Int)) {\n"
        "  LOAD xs; CONST_I 0; CONST_I 99; ASTORE; RET;\n"
        "}\n"
        "method main() -> Int {\n"
        "  local xs: ArrayOf(Int);\n"
        "  CONST_I 1; NEWARR Int; STORE xs;\n"
        "  LOAD xs; CONST_I 0; CONST_I 5; ASTORE;\n"
        "  LOAD xs; CALL poke;\n"
        "  LOAD xs; CONST_I 0; ALOAD; RET;\n"
        "}\n";
    CHECK(run_text(shared).value.as_int() == 99);
  }
}

namespace {

// sum(0..n-1), written as an explicit loop so a task can burn measurable time.
const char* kSpinProgram =
    "#transformed\n"
    "@Parallel(parDegree=2)\n"
    "method spin(n: Int) -> FutureOf(Int) {\n"
    "  local i: Int;\n"
    "  local acc: Int;\n"
    "  LOAD i; LOAD n; CMP_LT; JZ 13;\n"
    "  LOAD acc; LOAD i; ADD; STORE acc;\n"
    "  LOAD i; CONST_I 1; ADD; STORE i;\n"
    "  JMP 0;\n"
    "  LOAD acc; RET;\n"
    "}\n"
    "method main() -> Int {\n"
    "  CONST_I 1000000; SPAWN spin; TOUCH; RET;\n"
    "}\n";

}  // namespace

TEST_CASE("touch on a busy task blocks and the blocked time is recorded") {
  const RunOutcome out = run_text(kSpinProgram, 2, /*trusted=*/true);
  CHECK(out.value.as_int() == 499999500000LL);
  CHECK(out.stats.tasks_spawned == 1);
  CHECK(out.stats.touch_block_ms > 5.0);
  CHECK(out.stats.per_method.at("spin").tasks == 1);
  CHECK(out.stats.per_method.at("spin").max_ms() > 0.0);
}

namespace {

// `tasks` spin(n) tasks fanned out through a FutureOf array, then collected.
Program make_fanout(std::int64_t tasks, std::int64_t n) {
  Program p;
  MethodDef spin;
  spin.name = "spin";
  spin.params = {{"n", kind_int()}};
  spin.locals = {{"i", kind_int()}, {"acc", kind_int()}};
  spin.return_kind = future_of(kind_int());
  spin.annotation = ParallelAnnotation{2};
  {
    BodyBuilder b(spin);
    const int head = b.label(), end = b.label();
    b.place(head);
    b.load("i").load("n").op(Opcode::CMP_LT).jz(end);
    b.load("acc").load("i").op(Opcode::ADD).store("acc");
    b.load("i").const_i(1).op(Opcode::ADD).store("i");
    b.jmp(head);
    b.place(end);
    b.load("acc").op(Opcode::RET);
    spin.body = b.finish();
  }

  MethodDef m;
  m.name = "main";
  m.locals = {{"fs", array_of(future_of(kind_int()))},
              {"j", kind_int()},
              {"acc", kind_int()}};
  m.return_kind = kind_int();
  {
    BodyBuilder b(m);
    b.const_i(tasks).newarr(future_of(kind_int())).store("fs");
    const int spawn_head = b.label(), spawn_end = b.label();
    b.place(spawn_head);
    b.load("j").const_i(tasks).op(Opcode::CMP_LT).jz(spawn_end);
    b.load("fs").load("j").const_i(n).call("spin", 1).op(Opcode::ASTORE);
    b.load("j").const_i(1).op(Opcode::ADD).store("j");
    b.jmp(spawn_head);
    b.place(spawn_end);
    b.const_i(0).store("j");
    const int get_head = b.label(), get_end = b.label();
    b.place(get_head);
    b.load("j").const_i(tasks).op(Opcode::CMP_LT).jz(get_end);
    b.load("acc").load("fs").load("j").op(Opcode::ALOAD).op(Opcode::TOUCH);
    b.op(Opcode::ADD).store("acc");
    b.load("j").const_i(1).op(Opcode::ADD).store("j");
    b.jmp(get_head);
    b.place(get_end);
    b.load("acc").op(Opcode::RET);
    m.body = b.finish();
  }
  p.methods = {std::move(spin), std::move(m)};
  return p;
}

}  // namespace

TEST_CASE("per-pool concurrency never exceeds min(parDegree, cores)") {
  const TransformResult r = transform(make_fanout(8, 20000), cores(4));
  REQUIRE(r.report.rewritten_sites.size() == 1);
  const RunOutcome out = run(r.program, cores(4));
  CHECK(out.stats.tasks_spawned == 8);
  const MethodTaskStats& ms = out.stats.per_method.at("spin");
  CHECK(ms.tasks == 8);
  CHECK(ms.peak_concurrency >= 1);
  CHECK(ms.peak_concurrency <= 2);  // parDegree=2 caps the pool despite 4 cores
  CHECK(out.stats.peak_concurrency <= 2);
  CHECK(out.value.as_int() == 8 * (19999LL * 20000LL / 2));
}

TEST_CASE("a pool-exhaustion deadlock is detected and recovered, not hung") {
  // Each task spawns a child into its own two-worker pool and touches it; the
  // third generation can never be scheduled.
  const std::string text =
      "#transformed\n"
      "@Parallel(parDegree=2)\n"
      "method w(depth: Int) -> FutureOf(Int) {\n"
      "  LOAD depth; CONST_I 1; ADD; SPAWN w; TOUCH; RET;\n"
      "}\n"
      "method main() -> Int {\n"
      "  CONST_I 0; SPAWN w; TOUCH; RET;\n"
      "}\n";
  const auto t0 = std::chrono::steady_clock::now();
  bool recovered = false;
  try {
    (void)run_text(text, 2, /*trusted=*/true);
  } catch (const DeadlockError&) {
    recovered = true;
  } catch (const TrapError& e) {
    // The abort can also cascade through task futures as a synthetic trap.
    recovered = true;
    CHECK(e.info().message.find("deadlock") != std::string::npos);
  }
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  CHECK(recovered);
  CHECK(elapsed_ms < 5000.0);
}

TEST_CASE("verified programs never touch globals from tasks") {
  const Program p = parse_assembly(
      "@Parallel(parDegree=2)\n"
      "method work(a: Int) -> FutureOf(Int) {\n  LOAD a; RET;\n}\n"
      "method main() -> Int {\n"
      "  CONST_I 3; CALL work; TOUCH;\n"
      "  PUTSTATIC total; GETSTATIC total; RET;\n"
      "}\n");
  const TransformResult r = transform(p, cores(4));
  const RunOutcome out = run(r.program, cores(4));
  CHECK(out.value.as_int() == 3);
  CHECK(out.stats.task_global_accesses == 0);
}

TEST_CASE("the instrumentation does catch unverified task global access") {
  const RunOutcome out = run_text(
      "#transformed\n"
      "@Parallel(parDegree=2)\n"
      "method sneaky() -> FutureOf(Int) {\n  GETSTATIC g; RET;\n}\n"
      "method main() -> Int {\n  SPAWN sneaky; TOUCH; RET;\n}\n",
      2, /*trusted=*/true);
  CHECK(out.stats.task_global_accesses == 1);
}

TEST_CASE("task statistics aggregate correctly") {
  MethodTaskStats ms;
  CHECK(ms.mean_ms() == 0.0);
  CHECK(ms.max_ms() == 0.0);
  ms.task_ms = {1.0, 2.0, 3.0};
  CHECK(ms.mean_ms() == doctest::Approx(2.0));
  CHECK(ms.max_ms() == 3.0);
}

TEST_CASE("stats JSON carries exactly the documented fields") {
  const RunOutcome out = run_text(kSpinProgram, 2, /*trusted=*/true);
  const auto j = nlohmann::json::parse(stats_to_json(out.stats));
  REQUIRE(j.is_object());
  CHECK(j.size() == 5);
  CHECK(j.contains("wall_ms"));
  CHECK(j.contains("tasks_spawned"));
  CHECK(j.contains("peak_concurrency"));
  CHECK(j.contains("touch_block_ms"));
  REQUIRE(j.contains("per_method"));
  CHECK(j["tasks_spawned"] == 1);
  const auto& per = j["per_method"];
  REQUIRE(per.contains("spin"));
  CHECK(per["spin"].size() == 3);
  CHECK(per["spin"].contains("tasks"));
  CHECK(per["spin"].contains("mean_ms"));
  CHECK(per["spin"].contains("max_ms"));
  CHECK(j["wall_ms"].get<double>() > 0.0);
}

TEST_CASE("transformed and untransformed runs agree on random programs") {
  for (std::uint64_t seed = 500; seed < 505; ++seed) {
    CAPTURE(seed);
    const Program p = testsupport::random_program(seed);
    const RunOutcome base = run(p, cores(1));
    for (int ncores : {1, 4}) {
      const TransformResult r = transform(p, cores(ncores));
      const RunOutcome got = run(r.program, cores(ncores));
      CHECK(deep_equal(deep_reify(base.value), deep_reify(got.value)));
      REQUIRE(base.globals.size() == got.globals.size());
      for (const auto& [name, v] : base.globals)
        CHECK(deep_equal(v, got.globals.at(name)));
    }
  }
}
