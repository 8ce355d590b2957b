#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <streambuf>

#include "tracefold/cli.hpp"
#include "tracefold/foldt.hpp"
#include "tracefold/microlog.hpp"
#include "tracefold/monitors.hpp"
#include "tracefold/registry.hpp"

namespace tracefold::cli {

namespace {

using Clock = std::chrono::steady_clock;

class NullBuffer final : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
  std::streamsize xsputn(const char*, std::streamsize n) override { return n; }
};

enum class Config { prog, trace, foldt, monitor };

struct Runner {
  const microlog::Program& program;
  const microlog::Query& query;
  const ReportMonitor& monitor;
  std::ostream& sink_out;

  void run(Config c) const {
    microlog::SolveOptions opts;
    opts.output = &sink_out;
    opts.max_solutions = 1;
    switch (c) {
      case Config::prog: {
        opts.filter = EventFilter::nothing();
        NullSink sink;
        microlog::solve(program, query, &sink, opts);
        break;
      }
      case Config::trace: {
        NullSink sink;
        microlog::solve(program, query, &sink, opts);
        break;
      }
      case Config::foldt: {
        auto m = empty_monitor();
        IntervalFoldSink<std::uint8_t, std::uint8_t> sink(m, nullptr);
        microlog::solve(program, query, &sink, opts);
        sink.finish();
        break;
      }
      case Config::monitor: {
        IntervalFoldSink<std::any, std::string> sink(monitor, nullptr);
        microlog::solve(program, query, &sink, opts);
        sink.finish();
        break;
      }
    }
  }

  double time_batch(Config c, std::uint64_t iterations) const {
    auto start = Clock::now();
    for (std::uint64_t i = 0; i < iterations; ++i) run(c);
    return std::chrono::duration<double>(Clock::now() - start).count();
  }

  // Smallest power-of-two batch lasting at least `target` seconds.
  std::uint64_t calibrate(Config c, double target) const {
    std::uint64_t n = 1;
    while (true) {
      double t = time_batch(c, n);
      if (t >= target || n >= (1ULL << 30)) return n;
      n *= 2;
    }
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace

bool BenchRow::ordered(double noise) const {
  double slack = 1.0 + noise;
  return t_prog <= t_trace * slack && t_trace <= t_foldt * slack && t_foldt <= t_monitor * slack;
}

BenchRow bench_program(const std::filesystem::path& path, const BenchOptions& options) {
  auto program = microlog::load_program(path);
  auto query = microlog::parse_query(options.query, program);
  auto monitor = make_report_monitor(options.monitor, &program);
  NullBuffer null_buf;
  std::ostream null_out(&null_buf);
  Runner runner{program, query, monitor, null_out};

  BenchRow row;
  row.program = path.stem().string();
  {
    microlog::SolveOptions opts;
    opts.output = &null_out;
    opts.max_solutions = 1;
    row.events = microlog::solve(program, query, nullptr, opts).events;
  }

  const int reps = std::max(1, options.repetitions);
  const double target = options.min_duration / reps;
  const Config configs[] = {Config::prog, Config::trace, Config::foldt, Config::monitor};
  std::uint64_t iterations[4];
  for (int i = 0; i < 4; ++i) iterations[i] = runner.calibrate(configs[i], target);

  // Interleaved so that slow drifts of the machine affect every configuration.
  std::vector<double> samples[4];
  for (int r = 0; r < reps; ++r)
    for (int i = 0; i < 4; ++i)
      samples[i].push_back(runner.time_batch(configs[i], iterations[i]) /
                           static_cast<double>(iterations[i]));

  row.t_prog = median(samples[0]);
  row.t_trace = median(samples[1]);
  row.t_foldt = median(samples[2]);
  row.t_monitor = median(samples[3]);
  for (int i = 0; i < 4; ++i)
    if (iterations[i] >= (1ULL << 30))
      row.warnings.push_back("timer resolution too coarse for this program");
  return row;
}

std::string render_bench(const std::vector<BenchRow>& rows, const BenchOptions& options) {
  std::ostringstream out;
  out << std::fixed;
  out << std::left << std::setw(12) << "program" << std::right << std::setw(10) << "events"
      << std::setw(12) << "t_prog" << std::setw(12) << "t_trace" << std::setw(12) << "t_foldt"
      << std::setw(12) << "t_monitor" << std::setw(8) << "r_t" << std::setw(8) << "r_f"
      << std::setw(8) << "r*_f" << std::setw(8) << "r_m" << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(12) << r.program << std::right << std::setw(10) << r.events;
    out << std::setprecision(4);
    for (double t : {r.t_prog, r.t_trace, r.t_foldt, r.t_monitor})
      out << std::setw(10) << t * 1000.0 << "ms";
    out << std::setprecision(2);
    // No tracer/monitor language boundary here, so R*_f equals R_f.
    for (double x : {r.r_t(), r.r_f(), r.r_f(), r.r_m()}) out << std::setw(8) << x;
    out << "\n";
  }
  out << "times are medians of " << options.repetitions << " runs, each at least "
      << std::setprecision(2) << options.min_duration / options.repetitions
      << " s; t_monitor uses " << options.monitor << "\n";
  out << "monitors run in-process as plain calls: no interface cost is measured, r*_f = r_f\n";
  for (const auto& r : rows) {
    if (!r.ordered()) out << "warning: " << r.program << ": timings are not ordered within 10%\n";
    for (const auto& w : r.warnings) out << "warning: " << r.program << ": " << w << "\n";
  }
  return out.str();
}

}  // namespace tracefold::cli
