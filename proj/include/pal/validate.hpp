#pragma once

#include <vector>

#include "pal/diagnostics.hpp"
#include "pal/program.hpp"

namespace pal {

// Structural validation: unique method names, resolvable entry, resolvable
// call targets with matching arity, in-range jump targets and slots, and no
// SPAWN outside transformed programs. Diagnostics name the method and
// instruction index; output order is deterministic.
std::vector<Diagnostic> validate_program(const Program& program);

}  // namespace pal
