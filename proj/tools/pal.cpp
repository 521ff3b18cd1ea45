// pal — assemble, verify, transform, run, and benchmark PAL programs.
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pal/assembly.hpp"
#include "pal/bench.hpp"
#include "pal/platform.hpp"
#include "pal/runtime.hpp"
#include "pal/transform.hpp"
#include "pal/validate.hpp"
#include "pal/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProgramError = 1;  // diagnostics, traps, deadlock, divergence
constexpr int kExitUsage = 2;         // bad invocation, unreadable files

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << content;
}

void print_diagnostics(const std::vector<pal::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << pal::format_diagnostic(d) << "\n";
}

// --cores beats PAL_CORES beats hardware detection.
pal::PlatformInfo resolve_platform(std::optional<int> cli_cores) {
  if (!cli_cores) {
    if (const char* env = std::getenv("PAL_CORES"); env != nullptr && *env != '\0') {
      int v = 0;
      const char* last = env + std::string_view(env).size();
      auto [p, ec] = std::from_chars(env, last, v);
      if (ec != std::errc{} || p != last || v < 1)
        throw UsageError("PAL_CORES must be a positive integer, got '" + std::string(env) + "'");
      cli_cores = v;
    }
  }
  try {
    return pal::detect_platform(cli_cores);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Parse, then report every structural and parallel-constraint diagnostic.
// Returns the program when it is runnable (no errors; warnings pass).
std::optional<pal::Program> load_checked(const std::string& path, bool trusted) {
  pal::ParseOptions opts;
  opts.trusted = trusted;
  pal::Program program;
  try {
    program = pal::parse_assembly(read_file(path), opts);
  } catch (const pal::AssemblyError& e) {
    print_diagnostics(e.diagnostics());
    return std::nullopt;
  }
  std::vector<pal::Diagnostic> diags = pal::validate_program(program);
  {
    auto extra = pal::verify_parallel_constraints(program);
    diags.insert(diags.end(), extra.begin(), extra.end());
  }
  print_diagnostics(diags);
  if (pal::has_errors(diags)) return std::nullopt;
  return program;
}

int cmd_verify(const std::string& path, bool trusted) {
  auto program = load_checked(path, trusted);
  if (!program) return kExitProgramError;
  std::cout << "OK: " << program->methods.size() << " method(s), entry '" << program->entry
            << "'\n";
  return kExitOk;
}

nlohmann::ordered_json report_to_json(const pal::TransformReport& report, int cores) {
  nlohmann::ordered_json j;
  j["cores"] = cores;
  j["elapsed_ms"] = report.elapsed_ms;
  auto sites = nlohmann::ordered_json::array();
  for (const auto& s : report.rewritten_sites)
    sites.push_back({{"method", s.method},
                     {"instruction_index", s.instruction_index},
                     {"target", s.target}});
  j["rewritten_sites"] = std::move(sites);
  auto modes = nlohmann::ordered_json::object();
  for (const auto& [name, mode] : report.mode_per_method)
    modes[name] = {{"mode", mode.threaded() ? "Threaded" : "Inline"}, {"workers", mode.workers}};
  j["mode_per_method"] = std::move(modes);
  return j;
}

int cmd_transform(const std::string& in_path, const std::string& out_path,
                  std::optional<int> cores, const std::string& report_json) {
  pal::Program program;
  try {
    program = pal::parse_assembly(read_file(in_path));
  } catch (const pal::AssemblyError& e) {
    print_diagnostics(e.diagnostics());
    return kExitProgramError;
  }
  const pal::PlatformInfo platform = resolve_platform(cores);
  pal::TransformResult result;
  try {
    result = pal::transform(program, platform);
  } catch (const pal::TransformError& e) {
    print_diagnostics(e.diagnostics());
    std::cerr << "error: " << e.what() << "\n";
    return kExitProgramError;
  }
  write_file(out_path, pal::emit_assembly(result.program));
  if (!report_json.empty())
    write_file(report_json, report_to_json(result.report, platform.cores).dump(2) + "\n");
  std::cerr << "transformed on " << platform.cores << " core(s): "
            << result.report.rewritten_sites.size() << " call site(s) rewritten\n";
  for (const auto& [name, mode] : result.report.mode_per_method)
    std::cerr << "  " << name << ": " << pal::to_string(mode) << "\n";
  return kExitOk;
}

int cmd_run(const std::string& path, std::optional<int> cores, bool no_transform,
            const std::string& stats_json, bool trusted) {
  auto loaded = load_checked(path, trusted);
  if (!loaded) return kExitProgramError;
  pal::Program program = std::move(*loaded);
  const pal::PlatformInfo platform = resolve_platform(cores);
  if (!program.transformed && !no_transform)
    program = pal::transform(program, platform).program;

  pal::RunOutcome outcome;
  try {
    outcome = pal::run(program, platform);
  } catch (const pal::TrapError& e) {
    std::cerr << pal::format_trap(e.info()) << "\n";
    if (e.raised_at_touch())
      std::cerr << "note: task trap observed at TOUCH in " << e.touch_method() << "[#"
                << e.touch_index() << "]\n";
    return kExitProgramError;
  } catch (const pal::DeadlockError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProgramError;
  }

  if (!stats_json.empty()) write_file(stats_json, pal::stats_to_json(outcome.stats) + "\n");
  const pal::MethodDef* entry = program.find_method(program.entry);
  if (entry != nullptr && !entry->return_kind.is_void())
    std::cout << pal::value_to_string(outcome.value) << "\n";
  return kExitOk;
}

std::vector<std::pair<int, int>> parse_resolutions(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, int>> out;
  for (const auto& spec : specs) {
    const auto x = spec.find('x');
    int w = 0, h = 0;
    bool ok = x != std::string::npos;
    if (ok) {
      auto r1 = std::from_chars(spec.data(), spec.data() + x, w);
      auto r2 = std::from_chars(spec.data() + x + 1, spec.data() + spec.size(), h);
      ok = r1.ec == std::errc{} && r1.ptr == spec.data() + x && r2.ec == std::errc{} &&
           r2.ptr == spec.data() + spec.size() && w >= 1 && h >= 1;
    }
    if (!ok) throw UsageError("bad resolution '" + spec + "', expected WIDTHxHEIGHT");
    out.emplace_back(w, h);
  }
  return out;
}

int cmd_bench(const std::string& workload, const std::vector<std::string>& resolutions,
              const std::vector<int>& lines, const std::vector<int>& degrees,
              std::optional<int> cores, const std::string& csv, const std::string& pgm_dir,
              int max_iter, int reps) {
  if (workload != "mandelbrot")
    throw UsageError("unknown workload '" + workload + "', expected 'mandelbrot'");
  pal::bench::SweepOptions options;
  if (!resolutions.empty()) options.resolutions = parse_resolutions(resolutions);
  if (!lines.empty()) options.lines_per_task = lines;
  if (!degrees.empty()) options.par_degrees = degrees;
  options.cores = resolve_platform(cores).cores;
  options.max_iter = max_iter;
  options.reps = reps;
  options.log = &std::cerr;
  if (!pgm_dir.empty()) options.pgm_dir = pgm_dir;

  std::vector<pal::bench::EfficiencyRecord> records;
  try {
    records = pal::bench::run_sweep(options);
  } catch (const pal::bench::ValidationFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProgramError;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string table = pal::bench::records_to_csv(records);
  if (csv.empty())
    std::cout << table;
  else
    write_file(csv, table);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAL: a miniature annotated IL with a load-time parallelizing transformer"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Parse and check a .pal program");
  std::string verify_path;
  bool verify_trusted = false;
  verify->add_option("file", verify_path, ".pal source file")->required();
  verify->add_flag("--trusted", verify_trusted, "accept #transformed input containing SPAWN");

  auto* transform = app.add_subcommand("transform", "Rewrite @Parallel call sites to SPAWN");
  std::string tf_in, tf_out, tf_report;
  std::optional<int> tf_cores;
  transform->add_option("file", tf_in, ".pal source file")->required();
  transform->add_option("-o,--output", tf_out, "transformed .pal output path")->required();
  transform->add_option("--cores", tf_cores, "assume this many cores instead of detecting");
  transform->add_option("--report-json", tf_report, "write the rewrite report as JSON");

  auto* run = app.add_subcommand("run", "Transform (by default) and execute a program");
  std::string run_path, run_stats;
  std::optional<int> run_cores;
  bool run_no_transform = false, run_trusted = false;
  run->add_option("file", run_path, ".pal source file")->required();
  run->add_option("--cores", run_cores, "assume this many cores instead of detecting");
  run->add_flag("--no-transform", run_no_transform, "execute without the load-time rewrite");
  run->add_option("--stats-json", run_stats, "write execution statistics as JSON");
  run->add_flag("--trusted", run_trusted, "accept #transformed input containing SPAWN");

  auto* bench = app.add_subcommand("bench", "Benchmark a generated workload");
  std::string bench_workload, bench_csv, bench_pgm;
  std::vector<std::string> bench_res;
  std::vector<int> bench_lines, bench_degrees;
  std::optional<int> bench_cores;
  int bench_max_iter = 1000, bench_reps = 3;
  bench->add_option("workload", bench_workload, "workload name (mandelbrot)")->required();
  bench->add_option("--resolutions", bench_res, "comma-separated WxH list")->delimiter(',');
  bench->add_option("--lines", bench_lines, "comma-separated lines-per-task list")->delimiter(',');
  bench->add_option("--par-degree", bench_degrees, "comma-separated parDegree list")
      ->delimiter(',');
  bench->add_option("--cores", bench_cores, "assume this many cores instead of detecting");
  bench->add_option("--csv", bench_csv, "write the results table to this file");
  bench->add_option("--pgm", bench_pgm, "write a reference image per resolution into this dir");
  bench->add_option("--max-iter", bench_max_iter, "escape-iteration cap (default 1000)");
  bench->add_option("--reps", bench_reps, "runs per timing; the median is kept (default 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(verify_path, verify_trusted);
    if (transform->parsed()) return cmd_transform(tf_in, tf_out, tf_cores, tf_report);
    if (run->parsed())
      return cmd_run(run_path, run_cores, run_no_transform, run_stats, run_trusted);
    if (bench->parsed())
      return cmd_bench(bench_workload, bench_res, bench_lines, bench_degrees, bench_cores,
                       bench_csv, bench_pgm, bench_max_iter, bench_reps);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pal::TransformError& e) {
    print_diagnostics(e.diagnostics());
    std::cerr << "error: " << e.what() << "\n";
    return kExitProgramError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProgramError;
  }
  return kExitUsage;
}
