#include "pal/bench.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pal/assembly.hpp"
#include "pal/builder.hpp"
#include "pal/platform.hpp"
#include "pal/runtime.hpp"
#include "pal/transform.hpp"

namespace pal::bench {

int MandelbrotConfig::task_count() const {
  return (height + lines_per_task - 1) / lines_per_task;
}

void MandelbrotConfig::check() const {
  if (width < 1) throw std::invalid_argument("width must be at least 1");
  if (height < 1) throw std::invalid_argument("height must be at least 1");
  if (lines_per_task < 1) throw std::invalid_argument("lines_per_task must be at least 1");
  if (par_degree < 1) throw std::invalid_argument("par_degree must be at least 1");
  if (max_iter < 0) throw std::invalid_argument("max_iter must not be negative");
}

double pixel_re(const MandelbrotConfig& config, int x) {
  if (config.width == 1) return config.viewport.re_min;
  const double span = config.viewport.re_max - config.viewport.re_min;
  const double wm1 = static_cast<double>(config.width - 1);
  return config.viewport.re_min + span * (static_cast<double>(x) / wm1);
}

double pixel_im(const MandelbrotConfig& config, int y) {
  if (config.height == 1) return config.viewport.im_min;
  const double span = config.viewport.im_max - config.viewport.im_min;
  const double hm1 = static_cast<double>(config.height - 1);
  return config.viewport.im_min + span * (static_cast<double>(y) / hm1);
}

namespace {

// The worker: createLines(start_line, line_count) -> FutureOf(ArrayOf(Int)).
// Every float operation here has a mirror in mandelbrot_reference; the two
// must stay in lockstep for grids to compare bit-exactly.
MethodDef make_create_lines(const MandelbrotConfig& cfg) {
  const auto& vp = cfg.viewport;
  const double span_re = vp.re_max - vp.re_min;
  const double span_im = vp.im_max - vp.im_min;
  const double wm1 = static_cast<double>(cfg.width - 1);
  const double hm1 = static_cast<double>(cfg.height - 1);

  MethodDef m;
  m.name = "createLines";
  m.annotation = ParallelAnnotation{cfg.par_degree};
  m.params = {{"start_line", kind_int()}, {"line_count", kind_int()}};
  m.return_kind = future_of(array_of(kind_int()));
  m.locals = {{"out", array_of(kind_int())}, {"j", kind_int()},     {"k", kind_int()},
              {"x", kind_int()},             {"xf", kind_float()},  {"yf", kind_float()},
              {"c_re", kind_float()},        {"c_im", kind_float()},{"z_re", kind_float()},
              {"z_im", kind_float()},        {"zr2", kind_float()}, {"zi2", kind_float()},
              {"t", kind_float()},           {"iter", kind_int()}};

  BodyBuilder b(m);
  const int L_yf = b.label(), L_yf_done = b.label();
  const int L_row = b.label(), L_rows_done = b.label();
  const int L_col = b.label(), L_cols_done = b.label();
  const int L_iter = b.label(), L_body = b.label(), L_pixel_done = b.label();

  // out = new Int[line_count * width]
  b.load("line_count").const_i(cfg.width).op(Opcode::MUL).newarr(kind_int()).store("out");
  // yf = float(start_line), one +1.0 at a time: exact for any start_line that
  // fits a double's integer range, and the oracle's (double)y matches it.
  b.const_f(0.0).store("yf").const_i(0).store("k");
  b.place(L_yf);
  b.load("k").load("start_line").op(Opcode::CMP_LT).jz(L_yf_done);
  b.load("yf").const_f(1.0).op(Opcode::ADD).store("yf");
  b.load("k").const_i(1).op(Opcode::ADD).store("k");
  b.jmp(L_yf);
  b.place(L_yf_done);

  b.const_i(0).store("j");
  b.place(L_row);
  b.load("j").load("line_count").op(Opcode::CMP_LT).jz(L_rows_done);
  // c_im = im_min + span_im * (yf / (height-1))
  if (cfg.height == 1) {
    b.const_f(vp.im_min).store("c_im");
  } else {
    b.load("yf").const_f(hm1).op(Opcode::DIV);
    b.const_f(span_im).op(Opcode::MUL);
    b.const_f(vp.im_min).op(Opcode::ADD).store("c_im");
  }
  b.const_f(0.0).store("xf").const_i(0).store("x");
  b.place(L_col);
  b.load("x").const_i(cfg.width).op(Opcode::CMP_LT).jz(L_cols_done);
  // c_re = re_min + span_re * (xf / (width-1))
  if (cfg.width == 1) {
    b.const_f(vp.re_min).store("c_re");
  } else {
    b.load("xf").const_f(wm1).op(Opcode::DIV);
    b.const_f(span_re).op(Opcode::MUL);
    b.const_f(vp.re_min).op(Opcode::ADD).store("c_re");
  }
  // escape-time loop
  b.const_f(0.0).store("z_re").const_f(0.0).store("z_im").const_i(0).store("iter");
  b.place(L_iter);
  b.load("iter").const_i(cfg.max_iter).op(Opcode::CMP_LT).jz(L_pixel_done);
  b.load("z_re").load("z_re").op(Opcode::MUL).store("zr2");
  b.load("z_im").load("z_im").op(Opcode::MUL).store("zi2");
  b.const_f(4.0).load("zr2").load("zi2").op(Opcode::ADD).op(Opcode::CMP_LT).jz(L_body);
  b.jmp(L_pixel_done);  // 4.0 < |z|^2: escaped
  b.place(L_body);
  b.load("zr2").load("zi2").op(Opcode::SUB).load("c_re").op(Opcode::ADD).store("t");
  b.const_f(2.0).load("z_re").op(Opcode::MUL).load("z_im").op(Opcode::MUL);
  b.load("c_im").op(Opcode::ADD).store("z_im");
  b.load("t").store("z_re");
  b.load("iter").const_i(1).op(Opcode::ADD).store("iter");
  b.jmp(L_iter);
  b.place(L_pixel_done);
  // out[j*width + x] = iter
  b.load("out").load("j").const_i(cfg.width).op(Opcode::MUL).load("x").op(Opcode::ADD);
  b.load("iter").op(Opcode::ASTORE);
  b.load("xf").const_f(1.0).op(Opcode::ADD).store("xf");
  b.load("x").const_i(1).op(Opcode::ADD).store("x");
  b.jmp(L_col);
  b.place(L_cols_done);
  b.load("yf").const_f(1.0).op(Opcode::ADD).store("yf");
  b.load("j").const_i(1).op(Opcode::ADD).store("j");
  b.jmp(L_row);
  b.place(L_rows_done);
  b.load("out").op(Opcode::RET);

  m.body = b.finish();
  return m;
}

// main: one createLines call per block of lines, touch each future, stitch
// the blocks into the full pixel buffer.
MethodDef make_main(const MandelbrotConfig& cfg) {
  const int nb = cfg.task_count();
  MethodDef m;
  m.name = "main";
  m.return_kind = array_of(kind_int());
  m.locals = {{"futures", array_of(future_of(array_of(kind_int())))},
              {"pixels", array_of(kind_int())},
              {"block", array_of(kind_int())},
              {"b", kind_int()},
              {"start", kind_int()},
              {"count", kind_int()},
              {"base", kind_int()},
              {"i", kind_int()},
              {"len", kind_int()}};

  BodyBuilder b(m);
  const int L_spawn = b.label(), L_spawned = b.label(), L_count_ok = b.label();
  const int L_collect = b.label(), L_done = b.label();
  const int L_copy = b.label(), L_copied = b.label();

  b.const_i(nb).newarr(future_of(array_of(kind_int()))).store("futures");
  b.const_i(static_cast<std::int64_t>(cfg.width) * cfg.height).newarr(kind_int()).store("pixels");
  b.const_i(0).store("b");
  b.place(L_spawn);
  b.load("b").const_i(nb).op(Opcode::CMP_LT).jz(L_spawned);
  b.load("b").const_i(cfg.lines_per_task).op(Opcode::MUL).store("start");
  // count = min(lines_per_task, height - start)
  b.const_i(cfg.height).load("start").op(Opcode::SUB).store("count");
  b.const_i(cfg.lines_per_task).load("count").op(Opcode::CMP_LT).jz(L_count_ok);
  b.const_i(cfg.lines_per_task).store("count");
  b.place(L_count_ok);
  b.load("futures").load("b");
  b.load("start").load("count").call("createLines", 2);
  b.op(Opcode::ASTORE);
  b.load("b").const_i(1).op(Opcode::ADD).store("b");
  b.jmp(L_spawn);
  b.place(L_spawned);
  b.const_i(0).store("b");
  b.place(L_collect);
  b.load("b").const_i(nb).op(Opcode::CMP_LT).jz(L_done);
  b.load("futures").load("b").op(Opcode::ALOAD).op(Opcode::TOUCH).store("block");
  b.load("b").const_i(static_cast<std::int64_t>(cfg.lines_per_task) * cfg.width)
      .op(Opcode::MUL).store("base");
  b.const_i(0).store("i");
  b.load("block").op(Opcode::ALEN).store("len");
  b.place(L_copy);
  b.load("i").load("len").op(Opcode::CMP_LT).jz(L_copied);
  b.load("pixels").load("base").load("i").op(Opcode::ADD);
  b.load("block").load("i").op(Opcode::ALOAD).op(Opcode::ASTORE);
  b.load("i").const_i(1).op(Opcode::ADD).store("i");
  b.jmp(L_copy);
  b.place(L_copied);
  b.load("b").const_i(1).op(Opcode::ADD).store("b");
  b.jmp(L_collect);
  b.place(L_done);
  b.load("pixels").op(Opcode::RET);

  m.body = b.finish();
  return m;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

void append_num(std::string& out, double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, p);
}

}  // namespace

std::string gen_mandelbrot_program(const MandelbrotConfig& config) {
  config.check();
  Program p;
  p.name = "mandelbrot";
  p.methods.push_back(make_create_lines(config));
  p.methods.push_back(make_main(config));
  return emit_assembly(p);
}

std::vector<std::int32_t> mandelbrot_reference(const MandelbrotConfig& config) {
  config.check();
  const auto& vp = config.viewport;
  const double span_re = vp.re_max - vp.re_min;
  const double span_im = vp.im_max - vp.im_min;
  const double wm1 = static_cast<double>(config.width - 1);
  const double hm1 = static_cast<double>(config.height - 1);

  std::vector<std::int32_t> grid(static_cast<std::size_t>(config.width) *
                                 static_cast<std::size_t>(config.height));
  std::size_t at = 0;
  for (int y = 0; y < config.height; ++y) {
    const double yf = static_cast<double>(y);
    const double c_im = config.height == 1 ? vp.im_min : vp.im_min + span_im * (yf / hm1);
    for (int x = 0; x < config.width; ++x) {
      const double xf = static_cast<double>(x);
      const double c_re = config.width == 1 ? vp.re_min : vp.re_min + span_re * (xf / wm1);
      double z_re = 0.0, z_im = 0.0;
      int iter = 0;
      while (iter < config.max_iter) {
        const double zr2 = z_re * z_re;
        const double zi2 = z_im * z_im;
        const double mag = zr2 + zi2;
        if (4.0 < mag) break;
        const double t = (zr2 - zi2) + c_re;
        z_im = ((2.0 * z_re) * z_im) + c_im;
        z_re = t;
        ++iter;
      }
      grid[at++] = iter;
    }
  }
  return grid;
}

bool grid_matches(const Value& result, const std::vector<std::int32_t>& oracle) {
  if (!result.is_array()) return false;
  const auto& items = result.as_array()->items;
  if (items.size() != oracle.size()) return false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].is_int()) return false;
    if (items[i].as_int() != oracle[i]) return false;
  }
  return true;
}

std::pair<double, double> compute_efficiency(double t_seq, double t_par, int p) {
  if (!(t_seq > 0.0) || !(t_par > 0.0))
    throw std::invalid_argument("timings must be positive");
  if (p < 1) throw std::invalid_argument("worker count must be at least 1");
  const double speedup = t_seq / t_par;
  return {speedup, speedup / static_cast<double>(p)};
}

std::vector<EfficiencyRecord> run_sweep(const SweepOptions& options) {
  const PlatformInfo platform = detect_platform(options.cores >= 1
                                                    ? std::optional<int>(options.cores)
                                                    : std::nullopt);
  std::vector<EfficiencyRecord> records;
  for (const auto& [width, height] : options.resolutions) {
    MandelbrotConfig base;
    base.width = width;
    base.height = height;
    base.max_iter = options.max_iter;
    const std::vector<std::int32_t> oracle = mandelbrot_reference(base);

    if (options.pgm_dir) {
      std::string path = *options.pgm_dir + "/mandelbrot_" + std::to_string(width) + "x" +
                         std::to_string(height) + ".pgm";
      std::ostringstream buf;
      write_pgm(buf, oracle, width, height, base.max_iter);
      std::ofstream file(path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write " + path);
      file << buf.str();
    }

    for (int lines : options.lines_per_task) {
      for (int degree : options.par_degrees) {
        MandelbrotConfig cfg = base;
        cfg.lines_per_task = lines;
        cfg.par_degree = degree;

        const Program program = parse_assembly(gen_mandelbrot_program(cfg));
        const Program threaded = transform(program, platform).program;

        if (platform.cores < 2 && options.log)
          *options.log << "warning: " << platform.cores
                       << " core(s) available; parDegree " << degree
                       << " runs inline with no parallelism\n";

        auto timed = [&](const Program& variant) {
          std::vector<double> times;
          times.reserve(static_cast<std::size_t>(options.reps));
          for (int rep = 0; rep < std::max(1, options.reps); ++rep) {
            RunOutcome outcome = run(variant, platform);
            if (!grid_matches(outcome.value, oracle))
              throw ValidationFailed("pixel grid diverged from the reference at " +
                                     std::to_string(width) + "x" + std::to_string(height) +
                                     " lines=" + std::to_string(lines) +
                                     " parDegree=" + std::to_string(degree));
            times.push_back(outcome.stats.wall_ms);
          }
          return median(std::move(times));
        };

        EfficiencyRecord rec;
        rec.config = cfg;
        rec.cores = platform.cores;
        rec.t_seq_ms = timed(program);
        rec.t_par_ms = timed(threaded);
        const int p = std::min<int>(degree, platform.cores);
        auto [speedup, efficiency] = compute_efficiency(rec.t_seq_ms, rec.t_par_ms, p);
        rec.speedup = speedup;
        rec.efficiency = efficiency;
        records.push_back(rec);

        if (options.log) {
          *options.log << width << "x" << height << " lines=" << lines << " parDegree=" << degree
                       << ": t_seq=" << rec.t_seq_ms << "ms t_par=" << rec.t_par_ms
                       << "ms speedup=" << rec.speedup << " efficiency=" << rec.efficiency
                       << "\n";
        }
      }
    }
  }
  return records;
}

std::string records_to_csv(const std::vector<EfficiencyRecord>& records) {
  std::string out = "width,height,lines_per_task,par_degree,cores,t_seq_ms,t_par_ms,speedup,efficiency\n";
  for (const auto& r : records) {
    out += std::to_string(r.config.width) + ',' + std::to_string(r.config.height) + ',' +
           std::to_string(r.config.lines_per_task) + ',' + std::to_string(r.config.par_degree) +
           ',' + std::to_string(r.cores) + ',';
    append_num(out, r.t_seq_ms);
    out += ',';
    append_num(out, r.t_par_ms);
    out += ',';
    append_num(out, r.speedup);
    out += ',';
    append_num(out, r.efficiency);
    out += '\n';
  }
  return out;
}

void write_pgm(std::ostream& out, const std::vector<std::int32_t>& grid, int width, int height,
               int max_iter) {
  const int maxval = std::clamp(max_iter, 1, 65535);
  out << "P2\n" << width << ' ' << height << '\n' << maxval << '\n';
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out << ' ';
      out << std::min<std::int32_t>(grid[static_cast<std::size_t>(y) * width + x], maxval);
    }
    out << '\n';
  }
}

}  // namespace pal::bench
