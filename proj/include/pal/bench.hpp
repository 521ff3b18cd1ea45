#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pal/program.hpp"
#include "pal/value.hpp"

namespace pal::bench {

struct Viewport {
  double re_min = -2.5;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
};

struct MandelbrotConfig {
  int width = 600;
  int height = 400;
  int lines_per_task = 5;
  int par_degree = 2;
  int max_iter = 1000;
  Viewport viewport{};

  int task_count() const;  // ceil(height / lines_per_task)
  void check() const;      // throws std::invalid_argument on a bad config
};

// Assembly source of the Mandelbrot workload: an annotated
// createLines(start_line, line_count) -> FutureOf(ArrayOf(Int)) plus a main
// that calls it per block, touches every future, and assembles the full
// pixel buffer. Verifies clean by construction.
std::string gen_mandelbrot_program(const MandelbrotConfig& config);

// Native escape-time oracle, row-major width*height iteration counts. Its
// arithmetic mirrors the generated IL operation for operation, so grids
// compare bit-exactly.
std::vector<std::int32_t> mandelbrot_reference(const MandelbrotConfig& config);

// Complex-plane coordinates of a pixel column/row (exposed for tests).
double pixel_re(const MandelbrotConfig& config, int x);
double pixel_im(const MandelbrotConfig& config, int y);

// True when the interpreter's result (ArrayOf(Int) value) equals the oracle
// grid element for element.
bool grid_matches(const Value& result, const std::vector<std::int32_t>& oracle);

struct EfficiencyRecord {
  MandelbrotConfig config;
  int cores = 1;
  double t_seq_ms = 0.0;
  double t_par_ms = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
};

// speedup = t_seq/t_par, efficiency = speedup/p. Throws
// std::invalid_argument on nonpositive input.
std::pair<double, double> compute_efficiency(double t_seq, double t_par, int p);

struct SweepOptions {
  std::vector<std::pair<int, int>> resolutions = {{600, 400}, {1200, 800}, {2400, 1600}};
  std::vector<int> lines_per_task = {5, 10, 20, 40};
  std::vector<int> par_degrees = {2, 4};
  int cores = 1;
  int max_iter = 1000;
  int reps = 3;                        // timings are medians over reps runs
  std::ostream* log = nullptr;         // progress and warnings
  std::optional<std::string> pgm_dir;  // dump one PGM per resolution
};

class ValidationFailed : public std::runtime_error {
 public:
  explicit ValidationFailed(const std::string& what) : std::runtime_error(what) {}
};

// The resolution x granularity x parDegree sweep. Every run's pixels are
// checked against the oracle before its time is recorded; a mismatch aborts
// with ValidationFailed. Records come out in deterministic grid order.
std::vector<EfficiencyRecord> run_sweep(const SweepOptions& options);

// Header: width,height,lines_per_task,par_degree,cores,t_seq_ms,t_par_ms,speedup,efficiency
std::string records_to_csv(const std::vector<EfficiencyRecord>& records);

// P2 PGM, maxval = max_iter.
void write_pgm(std::ostream& out, const std::vector<std::int32_t>& grid, int width, int height,
               int max_iter);

}  // namespace pal::bench
