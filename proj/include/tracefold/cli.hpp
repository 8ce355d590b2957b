#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tracefold::cli {

enum ExitCode : int {
  kOk = 0,
  kThresholdFailed = 1,
  kUsageError = 2,
  kTraceError = 3,
};

// Entry point of the `tracefold` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchOptions {
  double min_duration = 2.0;  // seconds per measured configuration
  int repetitions = 5;
  std::string monitor = "call_graph";
  std::string query = "main";
};

// Per-run wall times in seconds (medians over the repetitions).
struct BenchRow {
  std::string program;
  std::uint64_t events = 0;
  double t_prog = 0;
  double t_trace = 0;
  double t_foldt = 0;
  double t_monitor = 0;
  std::vector<std::string> warnings;

  double r_t() const { return t_trace / t_prog; }
  double r_f() const { return t_foldt / t_prog; }
  double r_m() const { return t_monitor / t_prog; }
  // t_prog <= t_trace <= t_foldt <= t_monitor, each step allowing `noise`.
  bool ordered(double noise = 0.10) const;
};

BenchRow bench_program(const std::filesystem::path& program, const BenchOptions& options);
std::string render_bench(const std::vector<BenchRow>& rows, const BenchOptions& options);

}  // namespace tracefold::cli
