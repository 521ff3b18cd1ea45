#pragma once

#include <vector>

#include "pal/diagnostics.hpp"
#include "pal/program.hpp"

namespace pal {

// Enforces the constraints on @Parallel-annotated methods. Errors block
// transformation:
//   FieldAccessInParallel  global-slot access in an annotated method or in
//                          any method it (transitively) calls
//   MissingFutureReturn    annotated method not returning FutureOf(_)
//   BadParDegree           parDegree < 1
//   NestedParallelCall     annotated method (transitively) calling an
//                          annotated method
//   RestrictedParamKind    annotated method parameter that is not Int,
//                          Float, Bool, or an array of those
// Warning:
//   UnusedFutureReturn     non-annotated method returning FutureOf(_)
// Expects validate_program(program) to be error-free.
std::vector<Diagnostic> verify_parallel_constraints(const Program& program);

}  // namespace pal
