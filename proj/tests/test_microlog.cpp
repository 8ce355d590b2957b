#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "support.hpp"
#include "tracefold/errors.hpp"
#include "tracefold/microlog.hpp"

using namespace tracefold;
using namespace tracefold::microlog;

namespace {

struct Run {
  SolveResult result;
  std::vector<Event> events;
  std::string output;
};

Run run_text(const std::string& text, const std::string& query,
             AttributeMask mask = AttributeMask::all()) {
  Program prog = parse_program(text);
  std::ostringstream out;
  SolveOptions opts;
  opts.mask = mask;
  opts.output = &out;
  VectorSink sink;
  Run r;
  r.result = solve(prog, parse_query(query, prog), &sink, opts);
  r.events = std::move(sink.events);
  r.output = out.str();
  return r;
}

Run run_file(const std::string& name, const std::string& query = "main",
             AttributeMask mask = AttributeMask::all()) {
  return run_text(testsupport::read_file(testsupport::program(name)), query, mask);
}

std::string binding(const Solution& s, const std::string& var) {
  for (const auto& [name, value] : s.bindings)
    if (name == var) return to_string(value);
  return "?";
}

// Depth must equal the number of open frames after call/redo, and exit,
// fail and exception must close the innermost open frame.
std::string stack_violation(const std::vector<Event>& trace) {
  std::vector<std::uint64_t> stack;
  for (const auto& e : trace) {
    switch (e.port) {
      case Port::call:
      case Port::redo:
        stack.push_back(e.call);
        if (e.depth != stack.size()) return "depth mismatch at " + std::to_string(e.chrono);
        break;
      case Port::exit:
      case Port::fail:
      case Port::exception:
        if (stack.empty() || stack.back() != e.call)
          return "exit of a non-innermost frame at " + std::to_string(e.chrono);
        stack.pop_back();
        break;
      default:
        if (stack.empty() || stack.back() != e.call)
          return "internal event outside innermost frame at " + std::to_string(e.chrono);
        break;
    }
  }
  return stack.empty() ? std::string() : "unclosed frames at end of trace";
}

const char* kBundled[] = {"queens.mlg", "qsort.mlg", "fixtures/member.mlg",
                          "fixtures/colors.mlg", "fixtures/qsort3.mlg",
                          "fixtures/call_sites.mlg"};

}  // namespace

TEST_CASE("parsing the queens program") {
  Program p = load_program(testsupport::program("queens.mlg"));
  CHECK(p.module == "queens");
  CHECK(p.predicates.size() == 9);
  const Predicate* main = p.find("main", 2);
  REQUIRE(main);
  CHECK(main->committed_choice);
  CHECK(main->det == Determinism::multi);
  CHECK(p.find("nodiag", 3)->det == Determinism::semidet);
  CHECK(p.find("qdelete", 3)->clauses.size() == 2);
  CHECK(p.find("qdelete", 3)->proc.display() == "queens.qdelete/3-0");
}

TEST_CASE("a single fact") {
  Program p = parse_program("p.");
  REQUIRE(p.predicates.size() == 1);
  CHECK(p.predicates[0].name == "p");
  CHECK(p.predicates[0].arity == 0);
  CHECK(p.predicates[0].clauses.size() == 1);
  CHECK_FALSE(p.predicates[0].clauses[0].body.has_value());
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("cut is unsupported") {
    try {
      parse_program("p :-\n    !.");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.message().find("unsupported") != std::string::npos);
      CHECK(e.line() == 2);
      CHECK(e.column() == 5);
    }
  }
  SUBCASE("syntax error") {
    try {
      parse_program("p(a).\nq(b :- r.");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 1);
    }
  }
  SUBCASE("unknown predicate") {
    try {
      parse_program("p :- q.");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.message().find("q/0") != std::string::npos);
      CHECK(e.column() == 6);
    }
  }
  SUBCASE("other unsupported constructs") {
    CHECK_THROWS_AS(parse_program("p :- assert(q)."), ParseError);
    CHECK_THROWS_AS(parse_program("p(X) :- \\+ X = 1."), ParseError);
    CHECK_THROWS_AS(parse_program("p(X) :- X."), ParseError);
    CHECK_THROWS_AS(parse_program("is(1, 2)."), ParseError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_program(testsupport::program("none.mlg")), IoError); }
}

TEST_CASE("builtin table") {
  CHECK(builtin_determinism("is", 2) == Determinism::det);
  CHECK(builtin_determinism("=", 2) == Determinism::semidet);
  CHECK(builtin_determinism("fail", 0) == Determinism::failure);
  CHECK(builtin_determinism("write", 1) == Determinism::det);
  CHECK_FALSE(builtin_determinism("write", 2).has_value());
  CHECK_FALSE(builtin_determinism("assert", 1).has_value());
}

TEST_CASE("qdelete enumerates both removals in clause order") {
  auto r = run_file("queens.mlg", "qdelete(X, [1,2], R)");
  REQUIRE(r.result.solutions.size() == 2);
  CHECK(binding(r.result.solutions[0], "X") == "1");
  CHECK(binding(r.result.solutions[0], "R") == "[2]");
  CHECK(binding(r.result.solutions[1], "X") == "2");
  CHECK(binding(r.result.solutions[1], "R") == "[1]");
}

TEST_CASE("queen/2 finds exactly the brute-force 5 queens solutions") {
  std::set<std::string> oracle;
  std::vector<int> perm(5);
  std::iota(perm.begin(), perm.end(), 1);
  do {
    bool ok = true;
    for (int i = 0; i < 5 && ok; ++i)
      for (int j = i + 1; j < 5 && ok; ++j)
        if (std::abs(perm[i] - perm[j]) == j - i) ok = false;
    if (!ok) continue;
    std::string s = "[";
    for (int i = 0; i < 5; ++i) s += (i ? ", " : "") + std::to_string(perm[i]);
    oracle.insert(s + "]");
  } while (std::next_permutation(perm.begin(), perm.end()));
  REQUIRE(oracle.size() == 10);

  auto r = run_file("queens.mlg", "queen([1,2,3,4,5], Out)", AttributeMask::none());
  std::set<std::string> found;
  for (const auto& s : r.result.solutions) found.insert(binding(s, "Out"));
  CHECK(r.result.solutions.size() == 10);
  CHECK(found == oracle);
}

TEST_CASE("queens main prints the first solution and commits") {
  auto r = run_file("queens.mlg");
  CHECK(r.output == "A 5 queens solution is [1, 3, 5, 2, 4]\n");
  CHECK(r.result.solutions.size() == 1);
  CHECK(r.result.determinism_warnings.empty());
}

TEST_CASE("qsort sorts its data") {
  auto r = run_file("qsort.mlg");
  std::string out = r.output;
  REQUIRE(out.size() > 2);
  std::vector<long> nums;
  std::istringstream in(out.substr(1, out.find(']') - 1));
  std::string tok;
  while (std::getline(in, tok, ',')) nums.push_back(std::stol(tok));
  CHECK(nums.size() == 50);
  CHECK(std::is_sorted(nums.begin(), nums.end()));
  CHECK(r.result.determinism_warnings.empty());
}

TEST_CASE("query fail yields call then fail") {
  auto r = run_text("p.", "fail");
  CHECK(r.result.solutions.empty());
  REQUIRE(r.events.size() == 2);
  CHECK(r.events[0].port == Port::call);
  CHECK(r.events[1].port == Port::fail);
  CHECK(r.events[0].proc.name == "fail");
  CHECK(r.events[0].proc.decl_module == kBuiltinModule);
  CHECK(r.events[0].depth == 1);
  CHECK(r.events[1].call == r.events[0].call);
}

TEST_CASE("member backtracking produces redo before each later solution") {
  auto r = run_file("fixtures/member.mlg", "main(X)");
  REQUIRE(r.result.solutions.size() == 2);
  CHECK(binding(r.result.solutions[0], "X") == "2");
  CHECK(binding(r.result.solutions[1], "X") == "3");
  CHECK(r.events.size() == 32);
  CHECK(testsupport::byrd_violation(r.events).empty());
  CHECK(stack_violation(r.events).empty());
  // main/1 has a single clause: its exit is followed by a redo for the second answer.
  std::vector<Port> main_ports;
  for (const auto& e : r.events)
    if (e.proc.name == "main") main_ports.push_back(e.port);
  CHECK(main_ports == std::vector<Port>{Port::call, Port::exit, Port::redo, Port::exit,
                                        Port::redo, Port::fail});
}

TEST_CASE("disjunction branches are reported with their goal path") {
  auto r = run_file("fixtures/colors.mlg", "main(X)");
  REQUIRE(r.result.solutions.size() == 3);
  std::vector<std::string> disj;
  for (const auto& e : r.events)
    if (e.port == Port::disj) disj.push_back(to_string(e.goal_path));
  CHECK(disj == std::vector<std::string>{"[d1]", "[d2]", "[d3]"});
  CHECK(r.result.determinism_warnings.empty());
}

TEST_CASE("if-then-else events in nodiag") {
  auto r = run_file("queens.mlg", "nodiag(1, 1, [3])");
  CHECK(r.result.solutions.size() == 1);
  std::vector<std::string> seen;
  for (const auto& e : r.events)
    if (!is_external(e.port) && e.proc.name == "nodiag")
      seen.push_back(std::string(to_string(e.port)) + " " + to_string(e.goal_path));
  CHECK(seen == std::vector<std::string>{"if [c3, ?]", "else [c3, e]", "if [c3, e, ?]",
                                         "else [c3, e, e]"});

  auto hit = run_file("queens.mlg", "nodiag(1, 1, [2])");
  CHECK(hit.result.solutions.empty());
  seen.clear();
  for (const auto& e : hit.events)
    if (!is_external(e.port) && e.proc.name == "nodiag")
      seen.push_back(std::string(to_string(e.port)) + " " + to_string(e.goal_path));
  CHECK(seen == std::vector<std::string>{"if [c3, ?]", "then [c3, t]"});
}

TEST_CASE("the partition then-event carries args, types and local variables") {
  auto r = run_file("fixtures/qsort3.mlg");
  CHECK(r.output == "[1, 2, 3]\n");
  const Event* then = nullptr;
  for (const auto& e : r.events)
    if (e.port == Port::then && e.proc.name == "partition" &&
        to_string(Term::list(e.live_args())) == "[[1, 2], 3, -, -]") {
      then = &e;
      break;
    }
  REQUIRE(then != nullptr);
  CHECK(then->proc.display() == "qsort.partition/4-0");
  CHECK(then->det == Determinism::det);
  CHECK(then->live_arg_types() == std::vector<std::string>{"list(int)", "int", "-", "-"});
  auto vars = then->live_local_vars();
  REQUIRE(vars.size() == 2);
  CHECK(vars[0].name == "H");
  CHECK(to_string(vars[0].value) == "1");
  CHECK(vars[0].type_name == "int");
  CHECK(vars[1].name == "T");
  CHECK(to_string(vars[1].value) == "[2]");
  CHECK(vars[1].type_name == "list(int)");
  REQUIRE(then->line_number.has_value());
  CHECK(*then->line_number == 16);
}

TEST_CASE("runtime errors raise exception events up the chain") {
  Program prog = load_program(testsupport::program("fixtures/arith_error.mlg"));
  VectorSink sink;
  std::ostringstream out;
  SolveOptions opts;
  opts.output = &out;
  try {
    solve(prog, parse_query("main", prog), &sink, opts);
    FAIL("expected a runtime error");
  } catch (const RuntimeError& e) {
    std::string what = e.what();
    CHECK(what.find("is/2") != std::string::npos);
    CHECK(what.find("line 13") != std::string::npos);
    CHECK(e.partial().events == sink.events.size());
    CHECK(e.partial().solutions.empty());
  }
  std::vector<std::string> exceptions;
  for (const auto& e : sink.events)
    if (e.port == Port::exception) exceptions.push_back(e.proc.name);
  CHECK(exceptions == std::vector<std::string>{"is", "step", "main"});
  CHECK(testsupport::byrd_violation(sink.events).empty());
  CHECK(stack_violation(sink.events).empty());
}

TEST_CASE("integer overflow is a runtime error") {
  CHECK_THROWS_AS(run_text("p(X) :- X is 9223372036854775807 + 1.", "p(X)"), RuntimeError);
  CHECK_THROWS_AS(run_text("p(X) :- X is 1 // 0.", "p(X)"), RuntimeError);
  auto r = run_text("p(X) :- X is -7 mod 3.", "p(X)");
  CHECK(binding(r.result.solutions[0], "X") == "2");
}

TEST_CASE("determinism warnings") {
  auto bad = run_file("fixtures/det_violation.mlg");
  REQUIRE(bad.result.determinism_warnings.size() == 1);
  CHECK(bad.result.determinism_warnings[0].find("bad/1") != std::string::npos);

  auto failure = run_file("fixtures/failure.mlg");
  CHECK(failure.result.determinism_warnings.empty());

  auto twice = run_text(":- determinism p/1 is semidet.\np(1).\np(2).", "p(X)");
  CHECK(twice.result.determinism_warnings.size() == 1);
}

TEST_CASE("bundled programs satisfy the Byrd automaton and stack discipline") {
  for (const char* name : kBundled) {
    CAPTURE(name);
    auto r = run_file(name, "main", AttributeMask::none());
    CHECK(testsupport::byrd_violation(r.events).empty());
    CHECK(stack_violation(r.events).empty());
    CHECK(r.result.events == r.events.size());
    for (std::size_t i = 0; i < r.events.size(); ++i) CHECK(r.events[i].chrono == i + 1);
    std::uint64_t calls = 0;
    for (const auto& e : r.events) calls += e.port == Port::call;
    CHECK(r.result.calls == calls);
    CHECK(r.result.determinism_warnings.empty());
  }
}

TEST_CASE("max_solutions stops the search") {
  Program prog = load_program(testsupport::program("fixtures/colors.mlg"));
  SolveOptions opts;
  opts.max_solutions = 1;
  auto r = solve(prog, parse_query("main(X)", prog), nullptr, opts);
  REQUIRE(r.solutions.size() == 1);
  CHECK(binding(r.solutions[0], "X") == "red");
}

TEST_CASE("live trace equals the direct trace") {
  for (const char* name : {"queens.mlg", "qsort.mlg"}) {
    CAPTURE(name);
    auto direct = run_file(name, "main", AttributeMask::defaults());
    auto prog = std::make_shared<const Program>(load_program(testsupport::program(name)));
    std::ostringstream out;
    SolveOptions opts;
    opts.output = &out;
    LiveTrace live(prog, parse_query("main", *prog), opts, 16);
    auto events = drain(live);
    CHECK(events == direct.events);
    CHECK(live.result().events == direct.result.events);
    CHECK(out.str() == direct.output);
  }
}

TEST_CASE("abandoning a live trace early cancels the interpreter") {
  auto prog = std::make_shared<const Program>(load_program(testsupport::program("qsort.mlg")));
  std::ostringstream out;
  SolveOptions opts;
  opts.output = &out;
  {
    LiveTrace live(prog, parse_query("main", *prog), opts, 4);
    for (int i = 0; i < 10; ++i) CHECK(live.next().has_value());
  }
  CHECK(true);
}

TEST_CASE("live trace rethrows runtime errors after delivering the events") {
  auto prog = std::make_shared<const Program>(
      load_program(testsupport::program("fixtures/arith_error.mlg")));
  std::ostringstream out;
  SolveOptions opts;
  opts.output = &out;
  LiveTrace live(prog, parse_query("main", *prog), opts);
  std::size_t n = 0;
  bool thrown = false;
  try {
    while (live.next()) ++n;
  } catch (const RuntimeError&) {
    thrown = true;
  }
  CHECK(thrown);
  CHECK(n > 0);
}
