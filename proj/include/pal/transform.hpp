#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pal/diagnostics.hpp"
#include "pal/platform.hpp"
#include "pal/program.hpp"

namespace pal {

// How an annotated method's call sites execute: an asynchronous task pool of
// `workers` threads, or synchronously in the caller.
struct ExecutionMode {
  enum class Kind { Threaded, Inline };

  Kind kind = Kind::Inline;
  int workers = 0;  // min(parDegree, cores), set for Threaded only

  bool threaded() const { return kind == Kind::Threaded; }
};

bool operator==(const ExecutionMode& a, const ExecutionMode& b);
std::string to_string(const ExecutionMode& m);

struct RewriteSite {
  std::string method;        // method containing the call site
  int instruction_index = -1;
  std::string target;        // annotated callee
};

struct TransformReport {
  std::vector<RewriteSite> rewritten_sites;
  std::map<std::string, ExecutionMode> mode_per_method;  // every annotated method
  double elapsed_ms = 0.0;
};

struct TransformResult {
  Program program;
  TransformReport report;
};

class TransformError : public std::runtime_error {
 public:
  enum class Kind { AlreadyTransformed, VerificationFailed };

  TransformError(Kind kind, std::string what, std::vector<Diagnostic> diagnostics = {});
  Kind kind() const { return kind_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  Kind kind_;
  std::vector<Diagnostic> diagnostics_;
};

// Threaded(min(parDegree, cores)) when both parDegree and cores are at least
// 2; Inline otherwise. A single worker would only add overhead.
ExecutionMode decide_mode(const ParallelAnnotation& annotation, const PlatformInfo& platform);

// The load-time pass: every CALL whose target is annotated and Threaded
// becomes SPAWN; nothing else changes. Input must be untransformed and pass
// validation and verification (TransformError otherwise).
TransformResult transform(const Program& program, const PlatformInfo& platform);

}  // namespace pal
