#include <doctest.h>

#include <limits>
#include <string>

#include "pal/assembly.hpp"
#include "support/generator.hpp"

using namespace pal;

namespace {

std::vector<Diagnostic> parse_failure(const std::string& text, ParseOptions opts = {}) {
  try {
    (void)parse_assembly(text, opts);
  } catch (const AssemblyError& e) {
    REQUIRE_FALSE(e.diagnostics().empty());
    return e.diagnostics();
  }
  FAIL("expected AssemblyError");
  return {};
}

bool has_code(const std::vector<Diagnostic>& diags, std::string_view code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("parses a minimal program") {
  const Program p = parse_assembly("method main() {\n  RET;\n}\n");
  REQUIRE(p.methods.size() == 1);
  CHECK(p.name == "program");
  CHECK(p.entry == "main");
  CHECK_FALSE(p.transformed);
  CHECK(p.methods[0].return_kind.is_void());
  REQUIRE(p.methods[0].body.size() == 1);
  CHECK(p.methods[0].body[0].op == Opcode::RET);
}

TEST_CASE("directives, annotations, params, locals, and operands") {
  const char* text = R"(
program demo;
// slots resolve by name, params before locals
@Parallel(parDegree=3)
method worker(a: Int, xs: ArrayOf(Float)) -> FutureOf(Int) {
  local i: Int;
  LOAD xs; ALEN; STORE i;
  LOAD a; RET;
}

method main() -> Int {
  CONST_I 5; CONST_F -2.25; NEWARR Float;
  CALL worker;
  TOUCH; RET;
}
)";
  const Program p = parse_assembly(text);
  CHECK(p.name == "demo");
  const MethodDef* w = p.find_method("worker");
  REQUIRE(w != nullptr);
  REQUIRE(w->annotation.has_value());
  CHECK(w->annotation->par_degree == 3);
  CHECK(w->params[1].kind == array_of(kind_float()));
  CHECK(w->return_kind == future_of(kind_int()));
  // LOAD xs resolves to slot 1 (params first), local i is slot 2.
  CHECK(w->body[0].op == Opcode::LOAD);
  CHECK(w->body[0].int_operand == 1);
  CHECK(w->body[2].int_operand == 2);
  // CALL resolved against the target's arity even though worker is declared first.
  const MethodDef* m = p.find_method("main");
  REQUIRE(m != nullptr);
  CHECK(m->body[3].op == Opcode::CALL);
  CHECK(m->body[3].name == "worker");
  CHECK(m->body[3].int_operand == 2);
  CHECK(m->body[1].float_operand == -2.25);
}

TEST_CASE("semicolon is optional before the closing brace") {
  const Program p = parse_assembly("method main() {\n  RET\n}\n");
  CHECK(p.methods[0].body.size() == 1);
}

TEST_CASE("forward references resolve") {
  const Program p = parse_assembly(
      "method main() -> Int {\n  CALL helper; RET;\n}\n"
      "method helper() -> Int {\n  CONST_I 9; RET;\n}\n");
  CHECK(p.methods[0].body[0].int_operand == 0);
}

TEST_CASE("syntax errors carry locations and recovery finds later mistakes") {
  const auto diags = parse_failure(
      "method main() {\n  BOGUS_OP;\n  RET;\n}\n"
      "method other() {\n  CONST_I zzz;\n  RET;\n}\n");
  CHECK(has_code(diags, codes::SyntaxError));
  CHECK(diags.size() >= 2);  // both methods' mistakes reported
  CHECK(diags[0].line == 2);
  CHECK(diags[0].column >= 1);
}

TEST_CASE("resolution errors") {
  SUBCASE("duplicate method") {
    const auto diags = parse_failure("method main() { RET; }\nmethod main() { RET; }\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
  SUBCASE("duplicate slot") {
    const auto diags = parse_failure("method main(a: Int) {\n  local a: Int;\n  RET;\n}\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
  SUBCASE("unknown slot") {
    const auto diags = parse_failure("method main() {\n  LOAD ghost;\n  RET;\n}\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
  SUBCASE("unknown call target") {
    const auto diags = parse_failure("method main() {\n  CALL ghost;\n  RET;\n}\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
  SUBCASE("missing entry method") {
    const auto diags = parse_failure("method helper() { RET; }\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
  SUBCASE("entry directive names a missing method") {
    const auto diags = parse_failure("entry go;\nmethod main() { RET; }\n");
    CHECK(has_code(diags, codes::ResolutionError));
  }
}

TEST_CASE("void is rejected where a value kind is required") {
  CHECK(has_code(parse_failure("method main(x: Void) { RET; }\nmethod m2() { RET; }\n"),
                 codes::SyntaxError));
  CHECK(has_code(parse_failure("method main() {\n  local v: Void;\n  RET;\n}\n"),
                 codes::SyntaxError));
  CHECK(has_code(parse_failure("method main() {\n  CONST_I 0; NEWARR Void;\n  RET;\n}\n"),
                 codes::SyntaxError));
  CHECK(has_code(parse_failure("method main(x: FutureOf(FutureOf(Int))) { RET; }\n"),
                 codes::SyntaxError));
}

TEST_CASE("SPAWN and the transformed marker are trusted-only") {
  const std::string spawn_text =
      "method w() -> FutureOf(Int) {\n  CONST_I 1; RET;\n}\n"
      "method main() {\n  SPAWN w;\n  RET;\n}\n";
  SUBCASE("SPAWN in plain source is restricted") {
    CHECK(has_code(parse_failure(spawn_text), codes::RestrictedOpcode));
  }
  SUBCASE("marker without trust is restricted") {
    CHECK(has_code(parse_failure("#transformed\nmethod main() { RET; }\n"),
                   codes::RestrictedOpcode));
  }
  SUBCASE("marker plus trust accepts SPAWN") {
    ParseOptions opts;
    opts.trusted = true;
    const Program p = parse_assembly("#transformed\n" + spawn_text, opts);
    CHECK(p.transformed);
    CHECK(p.methods[1].body[0].op == Opcode::SPAWN);
    CHECK(p.methods[1].body[0].int_operand == 0);
  }
  SUBCASE("trust alone does not allow SPAWN without the marker") {
    ParseOptions opts;
    opts.trusted = true;
    CHECK(has_code(parse_failure(spawn_text, opts), codes::RestrictedOpcode));
  }
}

TEST_CASE("float literals round-trip, including infinities") {
  const Program p = parse_assembly(
      "method main() -> Float {\n  CONST_F 1e-05; CONST_F -inf; CONST_F 0.30000000000000004;\n"
      "  ADD; ADD; RET;\n}\n");
  CHECK(p.methods[0].body[0].float_operand == 1e-05);
  CHECK(p.methods[0].body[1].float_operand == -std::numeric_limits<double>::infinity());
  CHECK(p.methods[0].body[2].float_operand == 0.30000000000000004);
  const Program again = parse_assembly(emit_assembly(p));
  CHECK(again == p);
}

TEST_CASE("emitter output is canonical and parse(emit(p)) == p") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    pal::Program p = testsupport::random_program(seed);
    const std::string text = emit_assembly(p);
    const Program back = parse_assembly(text);
    REQUIRE(back == p);
    CHECK(emit_assembly(back) == text);  // emitting is idempotent
  }
}

TEST_CASE("transformed programs re-emit their marker") {
  Program p = testsupport::random_program(3);
  p.transformed = true;
  const std::string text = emit_assembly(p);
  REQUIRE(text.rfind("#transformed\n", 0) == 0);
  ParseOptions opts;
  opts.trusted = true;
  CHECK(parse_assembly(text, opts) == p);
}

TEST_CASE("diagnostics are capped on pathological input") {
  std::string text = "method main() {\n";
  for (int i = 0; i < 200; ++i) text += "  NOPE_" + std::to_string(i) + ";\n";
  text += "  RET;\n}\n";
  const auto diags = parse_failure(text);
  CHECK(diags.size() <= 50);
}
