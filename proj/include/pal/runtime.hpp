#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pal/platform.hpp"
#include "pal/program.hpp"
#include "pal/traps.hpp"
#include "pal/value.hpp"

namespace pal {

struct MethodTaskStats {
  std::int64_t tasks = 0;
  int peak_concurrency = 0;
  std::vector<double> task_ms;  // one entry per completed task

  double mean_ms() const;
  double max_ms() const;
};

struct ExecutionStats {
  double wall_ms = 0.0;
  std::int64_t tasks_spawned = 0;
  int peak_concurrency = 0;  // max over all method pools
  double touch_block_ms = 0.0;
  std::map<std::string, MethodTaskStats> per_method;
  // Instrumentation for the verifier's soundness property: global-slot
  // accesses evaluated inside spawned tasks (0 for every verified program).
  std::int64_t task_global_accesses = 0;
};

// JSON with exactly: wall_ms, tasks_spawned, peak_concurrency,
// touch_block_ms, per_method (name -> {tasks, mean_ms, max_ms}).
std::string stats_to_json(const ExecutionStats& stats);

struct RunOutcome {
  Value value;  // the entry method's result
  ExecutionStats stats;
  std::map<std::string, Value> globals;  // final global-slot state
};

// Interprets the program from its entry method. Worker pools for annotated
// methods are capped at min(parDegree, platform.cores) and started lazily at
// the first SPAWN. Throws TrapError or DeadlockError; either way all worker
// threads are joined before the exception leaves.
RunOutcome run(const Program& program, const PlatformInfo& platform);

}  // namespace pal
