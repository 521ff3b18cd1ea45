#include "pal/transform.hpp"

#include <algorithm>
#include <chrono>

#include "pal/validate.hpp"
#include "pal/verify.hpp"

namespace pal {

bool operator==(const ExecutionMode& a, const ExecutionMode& b) {
  return a.kind == b.kind && a.workers == b.workers;
}

std::string to_string(const ExecutionMode& m) {
  if (m.kind == ExecutionMode::Kind::Threaded)
    return "Threaded(" + std::to_string(m.workers) + ")";
  return "Inline";
}

TransformError::TransformError(Kind kind, std::string what, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(std::move(what)), kind_(kind), diagnostics_(std::move(diagnostics)) {}

ExecutionMode decide_mode(const ParallelAnnotation& annotation, const PlatformInfo& platform) {
  ExecutionMode mode;
  if (platform.cores >= 2 && annotation.par_degree >= 2) {
    mode.kind = ExecutionMode::Kind::Threaded;
    mode.workers = static_cast<int>(
        std::min<std::int64_t>(annotation.par_degree, platform.cores));
  }
  return mode;
}

TransformResult transform(const Program& program, const PlatformInfo& platform) {
  const auto start = std::chrono::steady_clock::now();

  if (program.transformed)
    throw TransformError(TransformError::Kind::AlreadyTransformed,
                         "program is already transformed");

  std::vector<Diagnostic> diags = validate_program(program);
  {
    std::vector<Diagnostic> extra = verify_parallel_constraints(program);
    diags.insert(diags.end(), extra.begin(), extra.end());
  }
  if (has_errors(diags)) {
    std::size_t errors = 0;
    for (const auto& d : diags)
      if (d.severity == Severity::Error) ++errors;
    throw TransformError(TransformError::Kind::VerificationFailed,
                         "verification failed with " + std::to_string(errors) + " error(s)",
                         std::move(diags));
  }

  TransformResult result;
  result.program = program;
  for (const auto& m : result.program.methods)
    if (m.annotated())
      result.report.mode_per_method[m.name] = decide_mode(*m.annotation, platform);

  for (auto& m : result.program.methods) {
    for (std::size_t i = 0; i < m.body.size(); ++i) {
      Instruction& in = m.body[i];
      if (in.op != Opcode::CALL) continue;
      auto it = result.report.mode_per_method.find(in.name);
      if (it == result.report.mode_per_method.end() || !it->second.threaded()) continue;
      in.op = Opcode::SPAWN;
      result.report.rewritten_sites.push_back({m.name, static_cast<int>(i), in.name});
    }
  }
  result.program.transformed = true;

  result.report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace pal
