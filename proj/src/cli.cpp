#include "tracefold/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "tracefold/coverage.hpp"
#include "tracefold/foldt.hpp"
#include "tracefold/microlog.hpp"
#include "tracefold/monitors.hpp"
#include "tracefold/registry.hpp"
#include "tracefold/trace_io.hpp"

namespace tracefold::cli {

namespace {

using Composite = Monitor<std::vector<std::any>, std::vector<std::string>>;

class TeeSink final : public TraceSink {
 public:
  void add(TraceSink* s) { sinks_.push_back(s); }
  void accept(const Event& e) override {
    for (auto* s : sinks_) s->accept(e);
  }
  void finish() override {
    for (auto* s : sinks_) s->finish();
  }

 private:
  std::vector<TraceSink*> sinks_;
};

struct Common {
  std::string query = "main";
  std::vector<std::string> monitors;
  std::string mask_text;
  std::vector<std::string> filters;
  std::string record;
  std::size_t max_solutions = 0;
};

EventFilter make_filter(const std::vector<std::string>& rules) {
  EventFilter f;
  for (const auto& r : rules) f.parse_rule(r);
  return f;
}

// An explicit --mask is used as given; otherwise the default mask plus what
// the selected monitors read.
AttributeMask effective_mask(const Common& c, AttributeMask extra = AttributeMask::none()) {
  if (!c.mask_text.empty()) return AttributeMask::parse(c.mask_text);
  AttributeMask m = AttributeMask::defaults();
  for (const auto& a : kOptionalAttributes) {
    if (extra.has(a)) m = m.with(a);
    for (const auto& name : c.monitors)
      if (required_attributes(name).has(a)) m = m.with(a);
  }
  return m;
}

struct Composed {
  std::vector<std::string> names;
  Composite monitor;
};

Composed compose(const std::vector<std::string>& names, const microlog::Program* program) {
  std::vector<ReportMonitor> ms;
  for (const auto& n : names) ms.push_back(make_report_monitor(n, program));
  return Composed{names, product_all(std::move(ms))};
}

void print_outcome(std::ostream& out, const Composed& c, const FoldOutcome<std::vector<std::string>>& o,
                   std::size_t index) {
  out << "# fold " << index << ": " << o.events_consumed << " events, " << to_string(o.stop)
      << "\n";
  for (std::size_t i = 0; i < o.result.size(); ++i) {
    if (o.result.size() > 1) out << "## " << c.names[i] << "\n";
    out << o.result[i];
  }
}

void print_run_summary(std::ostream& out, std::ostream& err, const microlog::SolveResult& r) {
  for (const auto& s : r.solutions)
    if (!s.bindings.empty()) out << "solution: " << s.to_string() << "\n";
  for (const auto& w : r.determinism_warnings) err << "warning: " << w << "\n";
}

int cmd_run(const std::string& path, const Common& c, std::ostream& out, std::ostream& err) {
  if (c.monitors.empty() && c.record.empty())
    throw CLI::ValidationError("run", "give at least one --monitor or --record");
  auto program = microlog::load_program(path);
  auto query = microlog::parse_query(c.query, program);

  microlog::SolveOptions opts;
  opts.filter = make_filter(c.filters);
  opts.mask = effective_mask(c);
  opts.max_solutions = c.max_solutions;
  opts.output = &out;

  TeeSink tee;
  std::unique_ptr<TraceWriter> writer;
  if (!c.record.empty()) {
    writer = std::make_unique<TraceWriter>(c.record, opts.mask);
    tee.add(writer.get());
  }
  std::optional<Composed> composed;
  std::unique_ptr<IntervalFoldSink<std::vector<std::any>, std::vector<std::string>>> fold;
  std::ostringstream reports;
  std::size_t index = 0;
  if (!c.monitors.empty()) {
    composed = compose(c.monitors, &program);
    fold = std::make_unique<IntervalFoldSink<std::vector<std::any>, std::vector<std::string>>>(
        composed->monitor, [&](const FoldOutcome<std::vector<std::string>>& o) {
          print_outcome(reports, *composed, o, ++index);
        });
    tee.add(fold.get());
  }

  auto result = microlog::solve(program, query, &tee, opts);
  tee.finish();
  out << reports.str();
  print_run_summary(out, err, result);
  if (writer) err << "recorded " << writer->events_written() << " events to " << c.record << "\n";
  return kOk;
}

int cmd_replay(const std::string& path, const Common& c, const std::string& program_path,
               std::ostream& out) {
  if (c.monitors.empty()) throw CLI::ValidationError("replay", "give at least one --monitor");
  std::optional<microlog::Program> program;
  if (!program_path.empty()) program = microlog::load_program(program_path);
  auto composed = compose(c.monitors, program ? &*program : nullptr);
  Session session(filtered(replay(path), make_filter(c.filters)));
  std::size_t index = 0;
  run_to_completion<std::vector<std::any>, std::vector<std::string>>(
      session, composed.monitor,
      [&](const FoldOutcome<std::vector<std::string>>& o) {
        print_outcome(out, composed, o, ++index);
      });
  return kOk;
}

// Folds `monitor` once over a live run (program output to `program_out`)
// or over a recorded trace.
template <class Acc, class Res>
Res fold_once(const Monitor<Acc, Res>& monitor, const microlog::Program& program,
              const Common& c, AttributeMask mask, const std::string& trace_path,
              std::ostream& program_out, std::ostream& err) {
  if (!trace_path.empty()) {
    Session session(filtered(replay(trace_path), make_filter(c.filters)));
    return run_foldt(session, monitor).result;
  }
  microlog::SolveOptions opts;
  opts.filter = make_filter(c.filters);
  opts.mask = mask;
  opts.max_solutions = c.max_solutions;
  opts.output = &program_out;
  auto query = microlog::parse_query(c.query, program);
  IntervalFoldSink<Acc, Res> sink(monitor, nullptr);
  auto r = microlog::solve(program, query, &sink, opts);
  sink.finish();
  for (const auto& w : r.determinism_warnings) err << "warning: " << w << "\n";
  return sink.outcomes().front().result;
}

int cmd_coverage(const std::string& path, const Common& c, const std::string& mode,
                 const std::string& trace_path, double threshold, std::ostream& out,
                 std::ostream& err) {
  auto program = microlog::load_program(path);
  double rate = 0;
  if (mode == "pred") {
    auto m = predicate_coverage(generate_pred_criteria(program));
    auto state = fold_once(m, program, c, effective_mask(c), trace_path, err, err);
    out << coverage_report(state);
    rate = state.rate();
  } else {
    auto m = call_site_coverage(generate_call_site_criteria(program));
    auto mask = effective_mask(c, AttributeMask::none().with(OptionalAttribute::line_number));
    auto state = fold_once(m, program, c, mask, trace_path, err, err);
    out << coverage_report(state);
    rate = state.rate();
  }
  if (rate + 1e-12 < threshold) {
    err << "coverage rate below threshold " << threshold << "\n";
    return kThresholdFailed;
  }
  return kOk;
}

int cmd_graph(const std::string& path, const Common& c, const std::string& kind,
              const std::string& trace_path, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  if (path.empty() && trace_path.empty())
    throw CLI::ValidationError("graph", "give a program or --trace");
  microlog::Program program;
  if (!path.empty()) program = microlog::load_program(path);
  Graph g;
  std::string title;
  if (kind == "callgraph") {
    title = "call_graph";
    g = fold_once(dynamic_call_graph(), program, c, effective_mask(c), trace_path, err, err);
  } else {
    bool counted = kind == "cfg-counted";
    title = counted ? "cfg_counted" : "cfg";
    g = fold_once(control_flow_graph(counted), program, c, effective_mask(c), trace_path, err,
                  err);
  }
  std::string dot = to_dot(g, title);
  if (out_path.empty()) {
    out << dot;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + out_path);
    f << dot;
    if (!f) throw IoError("cannot write " + out_path);
  }
  return kOk;
}

int cmd_bench(const std::vector<std::string>& programs, const BenchOptions& options,
              std::ostream& out) {
  std::vector<BenchRow> rows;
  for (const auto& p : programs) rows.push_back(bench_program(p, options));
  out << render_bench(rows, options);
  return kOk;
}

void add_common(CLI::App* cmd, Common& c, bool live) {
  cmd->add_option("--monitor", c.monitors,
                  "Monitor to run (repeatable). Several monitors run as one product fold, "
                  "which stops as soon as any of them stops.");
  cmd->add_option("--filter", c.filters, "Event granularity per module: MODULE=all|external|none");
  if (live) {
    cmd->add_option("--query", c.query, "Query to run")->capture_default_str();
    cmd->add_option("--mask", c.mask_text,
                    "Optional attributes to produce: args,arg_types,local_vars,line_number");
    cmd->add_option("--max-solutions", c.max_solutions, "Stop after N solutions (0 = all)")
        ->capture_default_str();
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trace analysis monitors over microlog executions"};
  app.name("tracefold");
  app.require_subcommand(1);

  Common run_c, replay_c, cov_c, graph_c;
  std::string run_path, replay_path, replay_program, cov_path, cov_mode = "pred", cov_trace,
                                                                  graph_path, graph_kind = "cfg",
                                                                  graph_trace, graph_out;
  double threshold = 0.0;
  BenchOptions bench;
  std::vector<std::string> bench_programs;

  auto* run = app.add_subcommand("run", "Run a program live under monitors");
  run->add_option("program", run_path, "microlog source file")->required();
  add_common(run, run_c, true);
  run->add_option("--record", run_c.record, "Also record the trace to PATH");

  auto* rep = app.add_subcommand("replay", "Run monitors over a recorded trace");
  rep->add_option("trace", replay_path, "Recorded trace file")->required();
  rep->add_option("--program", replay_program, "Program source, for coverage monitors");
  add_common(rep, replay_c, false);

  auto* cov = app.add_subcommand("coverage", "Predicate or call-site coverage report");
  cov->add_option("program", cov_path, "microlog source file")->required();
  add_common(cov, cov_c, true);
  cov->add_option("--mode", cov_mode, "pred or site")
      ->check(CLI::IsMember({"pred", "site"}))
      ->capture_default_str();
  cov->add_option("--trace", cov_trace, "Use a recorded trace instead of running the program");
  cov->add_option("--threshold", threshold, "Fail (exit 1) below this rate, 0..1")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto* gr = app.add_subcommand("graph", "Control flow or call graph in DOT");
  gr->add_option("program", graph_path, "microlog source file");
  add_common(gr, graph_c, true);
  gr->add_option("--kind", graph_kind, "cfg, cfg-counted or callgraph")
      ->check(CLI::IsMember({"cfg", "cfg-counted", "callgraph"}))
      ->capture_default_str();
  gr->add_option("--trace", graph_trace, "Use a recorded trace instead of running the program");
  gr->add_option("--out", graph_out, "Write the DOT text to PATH");

  auto* be = app.add_subcommand("bench", "Measure tracing and monitoring overhead");
  be->add_option("programs", bench_programs, "microlog source files")->required();
  be->add_option("--min-duration", bench.min_duration, "Seconds per measured configuration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  be->add_option("--monitor", bench.monitor, "Monitor for t_monitor")->capture_default_str();
  be->add_option("--query", bench.query, "Query to run")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (run->parsed()) return cmd_run(run_path, run_c, out, err);
    if (rep->parsed()) return cmd_replay(replay_path, replay_c, replay_program, out);
    if (cov->parsed()) return cmd_coverage(cov_path, cov_c, cov_mode, cov_trace, threshold, out, err);
    if (gr->parsed())
      return cmd_graph(graph_path, graph_c, graph_kind, graph_trace, graph_out, out, err);
    if (be->parsed()) return cmd_bench(bench_programs, bench, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const TraceIntegrityError& e) {
    err << "error: " << e.what() << "\n";
    return kTraceError;
  } catch (const MonitorIntegrityError& e) {
    err << "error: " << e.what() << "\n";
    return kTraceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace tracefold::cli
