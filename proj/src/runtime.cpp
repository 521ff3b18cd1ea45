#include "pal/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "pal/future.hpp"
#include "pal/transform.hpp"
#include "pal/validate.hpp"

namespace pal {

double MethodTaskStats::mean_ms() const {
  if (task_ms.empty()) return 0.0;
  double sum = 0.0;
  for (double t : task_ms) sum += t;
  return sum / static_cast<double>(task_ms.size());
}

double MethodTaskStats::max_ms() const {
  double best = 0.0;
  for (double t : task_ms) best = std::max(best, t);
  return best;
}

std::string stats_to_json(const ExecutionStats& stats) {
  nlohmann::ordered_json j;
  j["wall_ms"] = stats.wall_ms;
  j["tasks_spawned"] = stats.tasks_spawned;
  j["peak_concurrency"] = stats.peak_concurrency;
  j["touch_block_ms"] = stats.touch_block_ms;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [name, ms] : stats.per_method) {
    per[name] = {{"tasks", ms.tasks}, {"mean_ms", ms.mean_ms()}, {"max_ms", ms.max_ms()}};
  }
  j["per_method"] = std::move(per);
  return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct LinkedInstr {
  Opcode op = Opcode::HALT;
  std::int64_t a = 0;          // CONST_I value, slot, jump target, or argc
  double f = 0.0;              // CONST_F value
  int target = -1;             // method index for CALL/SPAWN
  int global = -1;             // global slot index for GETSTATIC/PUTSTATIC
  const ValueKind* kind = nullptr;  // NEWARR element kind
};

struct LinkedMethod {
  const MethodDef* def = nullptr;
  std::vector<LinkedInstr> code;
  bool wraps_future = false;  // declared return is FutureOf(inner)
  ValueKind inner;            // inner kind when wraps_future
  int pool = -1;              // task pool index for annotated methods
};

struct Task {
  int method = -1;
  std::vector<Value> args;
  FutureRef future;
};

struct Pool {
  std::string method_name;
  int capacity = 0;        // min(parDegree, cores); 0 means inline execution
  std::mutex m;
  std::condition_variable cv;
  std::deque<Task> queue;
  std::vector<std::thread> workers;
  bool started = false;
  bool stopping = false;

  // Watchdog-visible gauges; updated outside the queue lock.
  std::atomic<std::int64_t> queued{0};
  std::atomic<int> idle{0};
  std::atomic<int> active{0};
  std::atomic<int> peak{0};

  std::mutex stats_m;
  std::vector<double> task_ms;
  std::int64_t tasks = 0;
};

constexpr std::int64_t kMaxArrayLength = std::int64_t{1} << 31;

class Engine {
 public:
  Engine(const Program& program, const PlatformInfo& platform) : program_(program) {
    link(platform);
  }

  ~Engine() { shutdown(); }

  RunOutcome run_entry() {
    const auto t0 = Clock::now();
    RunOutcome outcome;
    const int entry = method_index(program_.entry);
    note_thread_active(+1);
    try {
      outcome.value = execute(entry, {}, false);
    } catch (...) {
      note_thread_active(-1);
      shutdown();
      throw;
    }
    note_thread_active(-1);
    shutdown();
    stats_finalize(outcome.stats, t0);
    {
      std::lock_guard<std::mutex> lock(globals_m_);
      for (std::size_t i = 0; i < global_names_.size(); ++i)
        outcome.globals[global_names_[i]] = globals_[i];
    }
    return outcome;
  }

 private:
  // ---- linking ----------------------------------------------------------

  int method_index(const std::string& name) const {
    for (std::size_t i = 0; i < methods_.size(); ++i)
      if (methods_[i].def->name == name) return static_cast<int>(i);
    return -1;
  }

  void link(const PlatformInfo& platform) {
    {
      auto diags = validate_program(program_);
      if (has_errors(diags))
        throw std::invalid_argument("program failed validation: " +
                                    format_diagnostic(diags.front()));
    }
    std::map<std::string, int> global_index;
    methods_.reserve(program_.methods.size());
    for (const auto& m : program_.methods) {
      LinkedMethod lm;
      lm.def = &m;
      if (m.return_kind.is_future()) {
        lm.wraps_future = true;
        lm.inner = m.return_kind.element();
      }
      methods_.push_back(std::move(lm));
    }
    for (std::size_t mi = 0; mi < program_.methods.size(); ++mi) {
      const MethodDef& m = program_.methods[mi];
      LinkedMethod& lm = methods_[mi];
      lm.code.reserve(m.body.size());
      for (const auto& in : m.body) {
        LinkedInstr li;
        li.op = in.op;
        li.a = in.int_operand;
        li.f = in.float_operand;
        switch (in.op) {
          case Opcode::CALL:
          case Opcode::SPAWN:
            li.target = method_index(in.name);
            break;
          case Opcode::GETSTATIC:
          case Opcode::PUTSTATIC: {
            auto [it, fresh] = global_index.emplace(in.name, static_cast<int>(global_names_.size()));
            if (fresh) global_names_.push_back(in.name);
            li.global = it->second;
            break;
          }
          case Opcode::NEWARR:
            li.kind = &in.kind;
            break;
          default:
            break;
        }
        lm.code.push_back(li);
      }
    }
    globals_.assign(global_names_.size(), Value::of_int(0));

    for (std::size_t mi = 0; mi < program_.methods.size(); ++mi) {
      const MethodDef& m = program_.methods[mi];
      if (!m.annotated()) continue;
      ExecutionMode mode = decide_mode(*m.annotation, platform);
      auto pool = std::make_unique<Pool>();
      pool->method_name = m.name;
      pool->capacity = mode.threaded() ? mode.workers : 0;
      methods_[mi].pool = static_cast<int>(pools_.size());
      pools_.push_back(std::move(pool));
    }
  }

  // ---- interpreter ------------------------------------------------------

  struct Frame {
    int method;
    std::int64_t ip = 0;
    std::vector<Value> slots;
    std::vector<Value> stack;
  };

  [[noreturn]] void trap(const Frame& fr, TrapKind kind, std::string msg) {
    TrapInfo info;
    info.kind = kind;
    info.method = methods_[static_cast<std::size_t>(fr.method)].def->name;
    info.instruction_index = static_cast<int>(fr.ip);
    info.message = std::move(msg);
    throw TrapError(std::move(info));
  }

  Value pop(Frame& fr) {
    if (fr.stack.empty()) trap(fr, TrapKind::StackUnderflow, "operand stack is empty");
    Value v = std::move(fr.stack.back());
    fr.stack.pop_back();
    return v;
  }

  Frame make_frame(int method, std::vector<Value> args) {
    const MethodDef& def = *methods_[static_cast<std::size_t>(method)].def;
    Frame fr;
    fr.method = method;
    fr.slots.reserve(def.slot_count());
    for (auto& a : args) fr.slots.push_back(std::move(a));
    for (const auto& l : def.locals) fr.slots.push_back(default_value(l.kind));
    fr.stack.reserve(16);
    return fr;
  }

  // Wrap a method's raw result the way its caller sees it: FutureOf returns
  // travel as already-filled futures so TOUCH is uniform across CALL/SPAWN.
  Value wrap_result(const LinkedMethod& lm, Value raw) {
    if (lm.wraps_future) return Value::of_future(make_filled_future(lm.inner, std::move(raw)));
    return raw;
  }

  Value halt_result(const LinkedMethod& lm) {
    const ValueKind& ret = lm.def->return_kind;
    if (ret.is_void()) return Value();
    if (lm.wraps_future) return Value::of_future(make_filled_future(lm.inner, default_value(lm.inner)));
    return default_value(ret);
  }

  std::vector<Value> pop_args(Frame& fr, const MethodDef& target, bool for_spawn) {
    const std::size_t argc = target.params.size();
    std::vector<Value> args(argc);
    for (std::size_t i = argc; i-- > 0;) args[i] = pop(fr);
    for (std::size_t i = 0; i < argc; ++i) {
      if (!matches(args[i], target.params[i].kind))
        trap(fr, TrapKind::TypeMismatch,
             "argument '" + target.params[i].name + "' of '" + target.name + "' expects " +
                 to_string(target.params[i].kind) + ", got " + to_string(kind_of(args[i])));
      if (for_spawn && contains_future(args[i]))
        trap(fr, TrapKind::TypeMismatch,
             "argument '" + target.params[i].name + "' of spawned '" + target.name +
                 "' contains a future");
    }
    // Arguments to @Parallel methods are copied in *both* execution modes, so
    // inline and threaded runs see identical aliasing.
    if (target.annotated())
      for (auto& a : args) a = deep_copy(a);
    return args;
  }

  // The caller is responsible for counting this thread as active (run_entry
  // for the main thread, run_task for workers and inline tasks).
  //
  // The dispatch loop caches the current frame, method, and code pointer in
  // locals; they are refreshed whenever the frame vector changes (CALL, RET,
  // fall-off-end). Binary operators rewrite the stack in place instead of
  // popping and pushing, which matters: this loop is the entire machine.
  Value execute(int root_method, std::vector<Value> root_args, bool in_task) {
    std::vector<Frame> frames;
    frames.reserve(8);
    frames.push_back(make_frame(root_method, std::move(root_args)));

    Value result;
    Frame* fr = nullptr;
    const LinkedMethod* lm = nullptr;
    const LinkedInstr* code = nullptr;
    std::int64_t code_size = 0;
    const auto refresh = [&] {
      fr = &frames.back();
      lm = &methods_[static_cast<std::size_t>(fr->method)];
      code = lm->code.data();
      code_size = static_cast<std::int64_t>(lm->code.size());
    };
    refresh();

    while (true) {
      if (fr->ip >= code_size) {
        // Falling off the end behaves like RET (valid for Void methods only).
        if (!lm->def->return_kind.is_void())
          trap(*fr, TrapKind::StackUnderflow,
               "method '" + lm->def->name + "' ended without returning a value");
        if (!finish_frame(frames, Value(), result)) return result;
        refresh();
        continue;
      }
      const LinkedInstr& in = code[fr->ip];
      switch (in.op) {
        case Opcode::CONST_I:
          fr->stack.push_back(Value::of_int(in.a));
          break;
        case Opcode::CONST_F:
          fr->stack.push_back(Value::of_float(in.f));
          break;
        case Opcode::LOAD:
          fr->stack.push_back(fr->slots[static_cast<std::size_t>(in.a)]);
          break;
        case Opcode::STORE: {
          if (fr->stack.empty()) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& v = fr->stack.back();
          const Slot& slot = lm->def->slot(static_cast<std::size_t>(in.a));
          if (!matches(v, slot.kind))
            trap(*fr, TrapKind::TypeMismatch,
                 "slot '" + slot.name + "' holds " + to_string(slot.kind) + ", got " +
                     to_string(kind_of(v)));
          fr->slots[static_cast<std::size_t>(in.a)] = std::move(v);
          fr->stack.pop_back();
          break;
        }
        case Opcode::ADD:
        case Opcode::SUB:
        case Opcode::MUL:
        case Opcode::DIV: {
          auto& st = fr->stack;
          if (st.size() < 2) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& a = st[st.size() - 2];
          const Value& b = st[st.size() - 1];
          if (a.is_int() && b.is_int()) {
            const auto x = static_cast<std::uint64_t>(a.as_int());
            const auto y = static_cast<std::uint64_t>(b.as_int());
            std::uint64_t r = 0;
            switch (in.op) {
              case Opcode::ADD: r = x + y; break;
              case Opcode::SUB: r = x - y; break;
              case Opcode::MUL: r = x * y; break;
              default: {
                if (b.as_int() == 0)
                  trap(*fr, TrapKind::DivideByZero, "integer division by zero");
                if (b.as_int() == -1)
                  r = std::uint64_t{0} - x;  // INT64_MIN / -1 wraps
                else
                  r = static_cast<std::uint64_t>(a.as_int() / b.as_int());
                break;
              }
            }
            a.v.emplace<std::int64_t>(static_cast<std::int64_t>(r));
            st.pop_back();
          } else if (a.is_float() && b.is_float()) {
            double r = 0;
            switch (in.op) {
              case Opcode::ADD: r = a.as_float() + b.as_float(); break;
              case Opcode::SUB: r = a.as_float() - b.as_float(); break;
              case Opcode::MUL: r = a.as_float() * b.as_float(); break;
              default: r = a.as_float() / b.as_float(); break;
            }
            a.v.emplace<double>(r);
            st.pop_back();
          } else {
            trap(*fr, TrapKind::TypeMismatch,
                 std::string(mnemonic(in.op)) + " expects two Ints or two Floats, got " +
                     to_string(kind_of(a)) + " and " + to_string(kind_of(b)));
          }
          break;
        }
        case Opcode::NEG: {
          if (fr->stack.empty()) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& a = fr->stack.back();
          if (a.is_int())
            a.v.emplace<std::int64_t>(
                static_cast<std::int64_t>(std::uint64_t{0} - static_cast<std::uint64_t>(a.as_int())));
          else if (a.is_float())
            a.v.emplace<double>(-a.as_float());
          else
            trap(*fr, TrapKind::TypeMismatch,
                 "NEG expects Int or Float, got " + to_string(kind_of(a)));
          break;
        }
        case Opcode::CMP_LT: {
          auto& st = fr->stack;
          if (st.size() < 2) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& a = st[st.size() - 2];
          const Value& b = st[st.size() - 1];
          if (a.is_int() && b.is_int())
            a.v.emplace<bool>(a.as_int() < b.as_int());
          else if (a.is_float() && b.is_float())
            a.v.emplace<bool>(a.as_float() < b.as_float());
          else
            trap(*fr, TrapKind::TypeMismatch,
                 "CMP_LT expects two Ints or two Floats, got " + to_string(kind_of(a)) + " and " +
                     to_string(kind_of(b)));
          st.pop_back();
          break;
        }
        case Opcode::CMP_EQ: {
          auto& st = fr->stack;
          if (st.size() < 2) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& a = st[st.size() - 2];
          const Value& b = st[st.size() - 1];
          if (a.is_int() && b.is_int())
            a.v.emplace<bool>(a.as_int() == b.as_int());
          else if (a.is_float() && b.is_float())
            a.v.emplace<bool>(a.as_float() == b.as_float());
          else if (a.is_bool() && b.is_bool())
            a.v.emplace<bool>(a.as_bool() == b.as_bool());
          else
            trap(*fr, TrapKind::TypeMismatch,
                 "CMP_EQ expects matching Int, Float, or Bool operands, got " +
                     to_string(kind_of(a)) + " and " + to_string(kind_of(b)));
          st.pop_back();
          break;
        }
        case Opcode::JMP:
          fr->ip = in.a;
          continue;
        case Opcode::JZ: {
          if (fr->stack.empty()) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          const Value& v = fr->stack.back();
          bool taken = false;
          if (v.is_bool())
            taken = !v.as_bool();
          else if (v.is_int())
            taken = v.as_int() == 0;
          else
            trap(*fr, TrapKind::TypeMismatch, "JZ expects Bool or Int, got " + to_string(kind_of(v)));
          fr->stack.pop_back();
          if (taken) {
            fr->ip = in.a;
            continue;
          }
          break;
        }
        case Opcode::CALL: {
          const LinkedMethod& target = methods_[static_cast<std::size_t>(in.target)];
          std::vector<Value> args = pop_args(*fr, *target.def, false);
          ++fr->ip;  // resume past the call once the callee returns
          frames.push_back(make_frame(in.target, std::move(args)));
          refresh();
          continue;
        }
        case Opcode::SPAWN: {
          do_spawn(*fr, in);
          break;
        }
        case Opcode::TOUCH: {
          Value v = pop(*fr);
          if (!v.is_future())
            trap(*fr, TrapKind::TypeMismatch, "TOUCH expects a future, got " + to_string(kind_of(v)));
          fr->stack.push_back(touch(*fr, *v.as_future(), in_task));
          break;
        }
        case Opcode::NEWARR: {
          Value n = pop(*fr);
          if (!n.is_int())
            trap(*fr, TrapKind::TypeMismatch, "NEWARR expects an Int length, got " + to_string(kind_of(n)));
          if (n.as_int() < 0 || n.as_int() > kMaxArrayLength)
            trap(*fr, TrapKind::OutOfBoundsArray,
                 "array length " + std::to_string(n.as_int()) + " is out of range");
          fr->stack.push_back(make_array(*in.kind, static_cast<std::size_t>(n.as_int())));
          break;
        }
        case Opcode::ALOAD: {
          auto& st = fr->stack;
          if (st.size() < 2) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& arr = st[st.size() - 2];
          const Value& idx = st[st.size() - 1];
          if (!arr.is_array() || !idx.is_int())
            trap(*fr, TrapKind::TypeMismatch, "ALOAD expects an array and an Int index");
          const auto& items = arr.as_array()->items;
          const std::int64_t i = idx.as_int();
          if (i < 0 || i >= static_cast<std::int64_t>(items.size()))
            trap(*fr, TrapKind::OutOfBoundsArray,
                 "index " + std::to_string(i) + " outside array of length " +
                     std::to_string(items.size()));
          Value item = items[static_cast<std::size_t>(i)];
          st.pop_back();
          st.back() = std::move(item);
          break;
        }
        case Opcode::ASTORE: {
          Value val = pop(*fr);
          Value idx = pop(*fr);
          Value arr = pop(*fr);
          if (!arr.is_array() || !idx.is_int())
            trap(*fr, TrapKind::TypeMismatch, "ASTORE expects an array, an Int index, and a value");
          auto& target = *arr.as_array();
          const std::int64_t i = idx.as_int();
          if (i < 0 || i >= static_cast<std::int64_t>(target.items.size()))
            trap(*fr, TrapKind::OutOfBoundsArray,
                 "index " + std::to_string(i) + " outside array of length " +
                     std::to_string(target.items.size()));
          if (!matches(val, target.elem))
            trap(*fr, TrapKind::TypeMismatch,
                 "array of " + to_string(target.elem) + " cannot hold " + to_string(kind_of(val)));
          target.items[static_cast<std::size_t>(i)] = std::move(val);
          break;
        }
        case Opcode::ALEN: {
          if (fr->stack.empty()) trap(*fr, TrapKind::StackUnderflow, "operand stack is empty");
          Value& arr = fr->stack.back();
          if (!arr.is_array())
            trap(*fr, TrapKind::TypeMismatch, "ALEN expects an array, got " + to_string(kind_of(arr)));
          const auto n = static_cast<std::int64_t>(arr.as_array()->items.size());
          arr.v.emplace<std::int64_t>(n);
          break;
        }
        case Opcode::GETSTATIC: {
          if (in_task) task_global_accesses_.fetch_add(1, std::memory_order_relaxed);
          std::lock_guard<std::mutex> lock(globals_m_);
          fr->stack.push_back(globals_[static_cast<std::size_t>(in.global)]);
          break;
        }
        case Opcode::PUTSTATIC: {
          if (in_task) task_global_accesses_.fetch_add(1, std::memory_order_relaxed);
          Value v = pop(*fr);
          std::lock_guard<std::mutex> lock(globals_m_);
          globals_[static_cast<std::size_t>(in.global)] = std::move(v);
          break;
        }
        case Opcode::RET: {
          Value raw;
          if (!lm->def->return_kind.is_void()) {
            raw = pop(*fr);
            const ValueKind& want = lm->wraps_future ? lm->inner : lm->def->return_kind;
            if (!matches(raw, want))
              trap(*fr, TrapKind::TypeMismatch,
                   "'" + lm->def->name + "' returns " + to_string(want) + ", got " +
                       to_string(kind_of(raw)));
          }
          if (!finish_frame(frames, std::move(raw), result)) return result;
          refresh();
          continue;
        }
        case Opcode::HALT: {
          // Stops this thread of control outright; the result is the root
          // method's default.
          const LinkedMethod& root = methods_[static_cast<std::size_t>(frames.front().method)];
          return halt_result(root);
        }
      }
      ++fr->ip;
    }
  }

  // Pops the finished frame, handing its wrapped result to the caller.
  // Returns false when the root frame finished; `out` then holds the result.
  bool finish_frame(std::vector<Frame>& frames, Value raw, Value& out) {
    const LinkedMethod& lm = methods_[static_cast<std::size_t>(frames.back().method)];
    const bool is_void = lm.def->return_kind.is_void();
    Value wrapped = is_void ? Value() : wrap_result(lm, std::move(raw));
    frames.pop_back();
    if (frames.empty()) {
      out = std::move(wrapped);
      return false;
    }
    if (!is_void) frames.back().stack.push_back(std::move(wrapped));
    return true;
  }

  // ---- spawning and pools -----------------------------------------------

  TrapInfo abandoned_task_info(const std::string& method) const {
    TrapInfo info;
    info.kind = TrapKind::TypeMismatch;
    info.method = method;
    info.message = "task abandoned by deadlock recovery";
    return info;
  }

  void do_spawn(Frame& fr, const LinkedInstr& in) {
    const LinkedMethod& target = methods_[static_cast<std::size_t>(in.target)];
    if (!target.def->annotated())
      trap(fr, TrapKind::TypeMismatch, "SPAWN target '" + target.def->name + "' is not @Parallel");
    if (!target.wraps_future)
      trap(fr, TrapKind::TypeMismatch,
           "SPAWN target '" + target.def->name + "' does not return FutureOf(...)");
    std::vector<Value> args = pop_args(fr, *target.def, true);
    tasks_spawned_.fetch_add(1, std::memory_order_relaxed);

    Pool& pool = *pools_[static_cast<std::size_t>(target.pool)];
    if (abort_.load(std::memory_order_relaxed)) {
      // Deadlock recovery is underway: starting more work would keep the
      // machine alive forever (a self-spawning chain refills the queue as
      // fast as it drains). Fail the task up front instead.
      FutureRef future = make_empty_future(target.inner);
      future->fail(abandoned_task_info(target.def->name));
      fr.stack.push_back(Value::of_future(std::move(future)));
      return;
    }
    if (pool.capacity == 0) {
      // Inline mode: run the task on the spot. Traps still surface at the
      // touch site, through the future.
      FutureRef future = make_empty_future(target.inner);
      run_task(pool, Task{in.target, std::move(args), future}, /*own_thread=*/false);
      fr.stack.push_back(Value::of_future(std::move(future)));
      return;
    }
    ensure_workers(pool);
    FutureRef future = make_empty_future(target.inner);
    {
      std::lock_guard<std::mutex> lock(pool.m);
      pool.queue.push_back(Task{in.target, std::move(args), future});
      pool.queued.fetch_add(1, std::memory_order_relaxed);
    }
    pool.cv.notify_one();
    fr.stack.push_back(Value::of_future(std::move(future)));
  }

  void ensure_workers(Pool& pool) {
    std::lock_guard<std::mutex> lock(pool.m);
    if (pool.started) return;
    pool.started = true;
    ensure_watchdog();
    pool.workers.reserve(static_cast<std::size_t>(pool.capacity));
    for (int i = 0; i < pool.capacity; ++i)
      pool.workers.emplace_back([this, &pool] { worker_loop(pool); });
  }

  void worker_loop(Pool& pool) {
    while (true) {
      Task task;
      {
        std::unique_lock<std::mutex> lock(pool.m);
        pool.idle.fetch_add(1, std::memory_order_relaxed);
        pool.cv.wait(lock, [&] { return pool.stopping || !pool.queue.empty(); });
        pool.idle.fetch_sub(1, std::memory_order_relaxed);
        if (pool.queue.empty()) return;  // stopping and drained
        task = std::move(pool.queue.front());
        pool.queue.pop_front();
        pool.queued.fetch_sub(1, std::memory_order_relaxed);
      }
      if (abort_.load(std::memory_order_relaxed)) {
        // Recovery: abandon queued work instead of executing it (it may spawn
        // more). Failing the future releases anything blocked on it.
        task.future->fail(abandoned_task_info(pool.method_name));
        continue;
      }
      run_task(pool, std::move(task), /*own_thread=*/true);
    }
  }

  // Executes one task body and resolves its future. Used by pool workers
  // (own_thread) and by inline-mode SPAWN on the calling thread, which is
  // already counted as active.
  void run_task(Pool& pool, Task task, bool own_thread) {
    const int active_now = pool.active.fetch_add(1, std::memory_order_relaxed) + 1;
    int seen = pool.peak.load(std::memory_order_relaxed);
    while (active_now > seen && !pool.peak.compare_exchange_weak(seen, active_now)) {
    }
    const int total_now = total_active_.fetch_add(1, std::memory_order_relaxed) + 1;
    seen = total_peak_.load(std::memory_order_relaxed);
    while (total_now > seen && !total_peak_.compare_exchange_weak(seen, total_now)) {
    }
    if (own_thread) note_thread_active(+1);

    const auto t0 = Clock::now();
    try {
      // execute() hands back the wrapped (already-filled) future for a
      // FutureOf method; the task's own future gets the inner value.
      Value raw = execute(task.method, std::move(task.args), true);
      if (raw.is_future()) raw = raw.as_future()->wait();
      task.future->fill(std::move(raw));
    } catch (const TrapError& e) {
      task.future->fail(e.info());
    } catch (const DeadlockError&) {
      task.future->fail(abandoned_task_info(pool.method_name));
    } catch (const std::exception& e) {
      TrapInfo info;
      info.kind = TrapKind::TypeMismatch;
      info.method = pool.method_name;
      info.message = std::string("task failed: ") + e.what();
      task.future->fail(std::move(info));
    }
    const double elapsed = ms_since(t0);
    {
      std::lock_guard<std::mutex> lock(pool.stats_m);
      pool.task_ms.push_back(elapsed);
      ++pool.tasks;
    }
    if (own_thread) note_thread_active(-1);
    total_active_.fetch_sub(1, std::memory_order_relaxed);
    pool.active.fetch_sub(1, std::memory_order_relaxed);
  }

  // ---- touch and deadlock watchdog --------------------------------------

  Value touch(Frame& fr, FutureCell& cell, bool in_task) {
    const bool will_block = !cell.ready();
    Clock::time_point t0;
    if (will_block) {
      t0 = Clock::now();
      note_thread_active(-1);
      blocked_.fetch_add(1, std::memory_order_relaxed);
    }
    struct BlockGuard {
      Engine* e;
      bool armed;
      Clock::time_point t0;
      ~BlockGuard() {
        if (!armed) return;
        e->blocked_.fetch_sub(1, std::memory_order_relaxed);
        e->note_thread_active(+1);
        e->touch_block_ms_.fetch_add(ms_since(t0), std::memory_order_relaxed);
      }
    } guard{this, will_block, t0};

    try {
      return cell.wait(will_block ? &abort_ : nullptr);
    } catch (const TrapError& e) {
      if (in_task) throw;  // the task's future carries it to the main thread's touch
      throw TrapError(e.info(), methods_[static_cast<std::size_t>(fr.method)].def->name,
                      static_cast<int>(fr.ip));
    }
  }

  void note_thread_active(int delta) { active_.fetch_add(delta, std::memory_order_relaxed); }

  void ensure_watchdog() {
    std::call_once(watchdog_once_, [this] { watchdog_ = std::thread([this] { watchdog_loop(); }); });
  }

  // Safety net, not a scheduler feature: when every thread of control sits in
  // TOUCH and no pool can pick up queued work, fire the abort flag so the
  // blocked waits give up instead of hanging forever. Requiring several
  // consecutive positive samples keeps mid-handoff snapshots (a worker
  // between dequeue and execute) from counting as deadlock.
  void watchdog_loop() {
    int strikes = 0;
    while (!watchdog_stop_.load(std::memory_order_relaxed)) {
      std::this_thread::sleep_for(std::chrono::milliseconds(25));
      const int active = active_.load(std::memory_order_relaxed);
      const int blocked = blocked_.load(std::memory_order_relaxed);
      bool pool_can_progress = false;
      for (auto& p : pools_) {
        if (p->queued.load(std::memory_order_relaxed) > 0 &&
            p->idle.load(std::memory_order_relaxed) > 0)
          pool_can_progress = true;
      }
      if (active == 0 && blocked > 0 && !pool_can_progress) {
        if (++strikes >= 8) {
          abort_.store(true, std::memory_order_relaxed);
          return;
        }
      } else {
        strikes = 0;
      }
    }
  }

  void shutdown() {
    if (shut_down_) return;
    shut_down_ = true;
    for (auto& p : pools_) {
      std::unique_lock<std::mutex> lock(p->m);
      if (!p->started) continue;
      p->stopping = true;
      lock.unlock();
      p->cv.notify_all();
      for (auto& w : p->workers) w.join();
    }
    watchdog_stop_.store(true, std::memory_order_relaxed);
    if (watchdog_.joinable()) watchdog_.join();
  }

  void stats_finalize(ExecutionStats& stats, Clock::time_point t0) {
    stats.tasks_spawned = tasks_spawned_.load();
    stats.peak_concurrency = total_peak_.load();
    stats.touch_block_ms = touch_block_ms_.load();
    stats.task_global_accesses = task_global_accesses_.load();
    for (auto& p : pools_) {
      MethodTaskStats ms;
      ms.tasks = p->tasks;
      ms.peak_concurrency = p->peak.load();
      ms.task_ms = p->task_ms;
      stats.per_method[p->method_name] = std::move(ms);
    }
    stats.wall_ms = ms_since(t0);
  }

  const Program& program_;
  std::vector<LinkedMethod> methods_;
  std::vector<std::unique_ptr<Pool>> pools_;

  std::vector<std::string> global_names_;
  std::vector<Value> globals_;
  std::mutex globals_m_;

  std::atomic<std::int64_t> tasks_spawned_{0};
  std::atomic<std::int64_t> task_global_accesses_{0};
  std::atomic<double> touch_block_ms_{0.0};
  std::atomic<int> total_active_{0};
  std::atomic<int> total_peak_{0};

  // Deadlock watchdog state: threads executing IL vs. blocked in TOUCH.
  std::atomic<int> active_{0};
  std::atomic<int> blocked_{0};
  std::atomic<bool> abort_{false};
  std::thread watchdog_;
  std::once_flag watchdog_once_;
  std::atomic<bool> watchdog_stop_{false};
  bool shut_down_ = false;
};

}  // namespace

RunOutcome run(const Program& program, const PlatformInfo& platform) {
  Engine engine(program, platform);
  return engine.run_entry();
}

}  // namespace pal
