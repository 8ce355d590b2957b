#pragma once

// microlog: a small SLD-resolution interpreter for a Prolog-like language
// with disjunction and committed if-then-else. Execution is traced with
// Byrd box events (call/exit/redo/fail/exception plus the internal
// disj/if/then/else branch events).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tracefold/event.hpp"
#include "tracefold/trace_io.hpp"

namespace tracefold::microlog {

inline const std::string kBuiltinModule = "builtin";

// Source-level term. Variables are numbered per clause.
struct TermAst {
  enum class Kind : std::uint8_t { var, integer, atom, compound };

  Kind kind = Kind::atom;
  std::int64_t value = 0;
  std::string name;
  std::uint32_t var = 0;
  std::vector<TermAst> args;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

struct Goal {
  enum class Kind : std::uint8_t { call, builtin, conj, disj, if_then_else };

  Kind kind = Kind::conj;
  // call / builtin
  std::string name;
  std::vector<TermAst> args;
  std::optional<std::uint32_t> line;  // absent for top-level query goals
  std::uint32_t column = 0;
  std::size_t target = 0;             // predicate or builtin index
  // conj members, disj branches, or {cond, then[, else]}
  std::vector<Goal> children;
  bool has_else = true;
  GoalPath path;
};

struct Clause {
  TermAst head;
  std::optional<Goal> body;  // absent for facts
  std::uint32_t num_vars = 0;
  std::vector<std::string> var_names;
  std::vector<bool> is_head_arg_var;
  std::uint32_t line = 0;
};

struct Predicate {
  std::string name;
  std::uint32_t arity = 0;
  std::vector<Clause> clauses;
  Determinism det = Determinism::nondet;
  bool declared = false;
  // cc_multi / cc_nondet: callers commit to the first solution
  bool committed_choice = false;
  ProcId proc;
};

struct CallSite {
  std::string callee;
  std::uint32_t arity = 0;
  std::uint32_t line = 0;
  std::string caller;
};

struct BuiltinInfo {
  std::string name;
  std::uint32_t arity = 0;
  Determinism det = Determinism::det;
};

const std::vector<BuiltinInfo>& builtin_table();
std::optional<Determinism> builtin_determinism(std::string_view name, std::uint32_t arity);

struct Program {
  std::string module = "user";
  std::vector<Predicate> predicates;

  const Predicate* find(std::string_view name, std::uint32_t arity) const;
  std::optional<std::size_t> index_of(std::string_view name, std::uint32_t arity) const;
  // Call sites of user predicates in clause bodies, in source order.
  std::vector<CallSite> call_sites() const;
};

// Module name defaults to `default_module` unless the text declares one.
Program parse_program(std::string_view text, const std::string& default_module = "user");
Program load_program(const std::filesystem::path& path);

struct Query {
  Goal goal;
  std::uint32_t num_vars = 0;
  std::vector<std::string> var_names;
};

// A bare atom naming a predicate that exists only at a single non-zero
// arity is completed with anonymous arguments ("main" -> main(_, _)).
Query parse_query(std::string_view text, const Program& program);

struct Solution {
  std::vector<std::pair<std::string, Term>> bindings;

  std::string to_string() const;
  friend bool operator==(const Solution&, const Solution&) = default;
};

struct SolveOptions {
  std::size_t max_solutions = 0;  // 0 = all
  EventFilter filter;
  AttributeMask mask = AttributeMask::defaults();
  std::ostream* output = nullptr;  // program output; nullptr = std::cout
};

struct SolveResult {
  std::vector<Solution> solutions;
  std::uint64_t events = 0;  // events generated (before filtering)
  std::uint64_t calls = 0;
  std::vector<std::string> determinism_warnings;
};

class RuntimeError : public Error {
 public:
  RuntimeError(const std::string& what, SolveResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const SolveResult& partial() const noexcept { return partial_; }

 private:
  SolveResult partial_;
};

// Runs `query` emitting events into `sink` (may be null).
SolveResult solve(const Program& program, const Query& query, TraceSink* sink,
                  const SolveOptions& options = {});

// A live trace: the interpreter runs on its own thread and hands events to
// the consumer through a bounded channel. Destroying the source before the
// end of the trace cancels the interpreter.
class LiveTrace final : public TraceSource {
 public:
  LiveTrace(std::shared_ptr<const Program> program, Query query, SolveOptions options,
            std::size_t capacity = 1024);
  ~LiveTrace() override;
  LiveTrace(const LiveTrace&) = delete;
  LiveTrace& operator=(const LiveTrace&) = delete;

  std::optional<Event> next() override;
  // Waits for the interpreter to finish. Valid after end of trace.
  const SolveResult& result();

 private:
  std::shared_ptr<const Program> program_;
  Query query_;
  SolveOptions options_;
  EventChannel channel_;
  SolveResult result_;
  std::thread worker_;
  bool joined_ = false;
};

}  // namespace tracefold::microlog
