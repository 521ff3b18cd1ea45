#include "pal/verify.hpp"

#include <deque>
#include <set>
#include <string>

namespace pal {

namespace {

Diagnostic make(Severity sev, std::string_view code, std::string method, std::int64_t index,
                std::string msg) {
  Diagnostic d;
  d.severity = sev;
  d.code = std::string(code);
  d.method = std::move(method);
  d.instruction_index = index;
  d.message = std::move(msg);
  return d;
}

// Methods reachable from `root` through CALL/SPAWN edges, traversing only
// non-annotated callees. Annotated callees are reported as nested-parallel
// sites by the caller's scan, and their own bodies are checked when the loop
// reaches them as roots.
std::set<std::string> reachable_from(const Program& program, const MethodDef& root) {
  std::set<std::string> visited{root.name};
  std::deque<const MethodDef*> queue{&root};
  while (!queue.empty()) {
    const MethodDef* m = queue.front();
    queue.pop_front();
    for (const auto& in : m->body) {
      if (in.op != Opcode::CALL && in.op != Opcode::SPAWN) continue;
      const MethodDef* target = program.find_method(in.name);
      if (target == nullptr || target->annotated()) continue;
      if (visited.insert(target->name).second) queue.push_back(target);
    }
  }
  return visited;
}

}  // namespace

std::vector<Diagnostic> verify_parallel_constraints(const Program& program) {
  std::vector<Diagnostic> diags;

  for (const auto& root : program.methods) {
    if (!root.annotated()) continue;

    if (root.annotation->par_degree < 1)
      diags.push_back(make(Severity::Error, codes::BadParDegree, root.name, -1,
                           "parDegree must be at least 1, got " +
                               std::to_string(root.annotation->par_degree)));

    if (!root.return_kind.is_future())
      diags.push_back(make(Severity::Error, codes::MissingFutureReturn, root.name, -1,
                           "@Parallel method '" + root.name + "' must return FutureOf(...), not " +
                               to_string(root.return_kind)));

    for (const auto& p : root.params) {
      if (!is_plain_data(p.kind))
        diags.push_back(make(Severity::Error, codes::RestrictedParamKind, root.name, -1,
                             "@Parallel parameter '" + p.name + "' has kind " + to_string(p.kind) +
                                 "; only Int, Float, Bool, and arrays of those are allowed"));
    }

    std::set<std::string> closure = reachable_from(program, root);
    for (const auto& m : program.methods) {
      if (closure.find(m.name) == closure.end()) continue;
      const bool direct = m.name == root.name;
      for (std::size_t i = 0; i < m.body.size(); ++i) {
        const Instruction& in = m.body[i];
        const auto idx = static_cast<std::int64_t>(i);
        if (in.op == Opcode::GETSTATIC || in.op == Opcode::PUTSTATIC) {
          std::string msg = "global slot '" + in.name + "' accessed ";
          msg += direct ? "inside @Parallel method '" + root.name + "'"
                        : "by '" + m.name + "', reachable from @Parallel method '" + root.name +
                              "'";
          diags.push_back(make(Severity::Error, codes::FieldAccessInParallel, m.name, idx,
                               std::move(msg)));
        } else if (in.op == Opcode::CALL || in.op == Opcode::SPAWN) {
          const MethodDef* target = program.find_method(in.name);
          if (target != nullptr && target->annotated()) {
            std::string msg = "call to @Parallel method '" + in.name + "' ";
            msg += direct ? "inside @Parallel method '" + root.name + "'"
                          : "by '" + m.name + "', reachable from @Parallel method '" + root.name +
                                "'";
            diags.push_back(make(Severity::Error, codes::NestedParallelCall, m.name, idx,
                                 std::move(msg)));
          }
        }
      }
    }
  }

  for (const auto& m : program.methods) {
    if (!m.annotated() && m.return_kind.is_future())
      diags.push_back(make(Severity::Warning, codes::UnusedFutureReturn, m.name, -1,
                           "method '" + m.name +
                               "' returns FutureOf(...) but carries no @Parallel annotation"));
  }

  return diags;
}

}  // namespace pal
