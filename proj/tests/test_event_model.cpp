#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tracefold/errors.hpp"
#include "tracefold/event.hpp"

using namespace tracefold;

namespace {

// The partition/4 event of the qsort example run on [3, 1, 2].
Event partition_event() {
  Event e;
  e.chrono = 10;
  e.call = 6;
  e.depth = 5;
  e.port = Port::then;
  e.det = Determinism::det;
  e.proc = ProcId{ProcKind::predicate, "qsort", "qsort", "partition", 4, 0};
  e.goal_path = {GoalPathStep::switch_branch(1), GoalPathStep::conj(2), GoalPathStep::then()};
  e.mask = AttributeMask::all();
  e.args = std::vector<Term>{Term::list({Term::integer(1), Term::integer(2)}), Term::integer(3),
                             Term::unbound(), Term::unbound()};
  e.arg_types = std::vector<std::string>{"list(int)", "int", "-", "-"};
  e.local_vars = std::vector<LiveVar>{{"H", Term::integer(1), "int"},
                                      {"T", Term::list({Term::integer(2)}), "list(int)"}};
  return e;
}

Term random_term(std::mt19937_64& rng, int depth) {
  static const char* atoms[] = {"a", "foo", "[]", "Hello", "x y", "it's", "+", "b_2"};
  unsigned k = depth <= 0 ? rng() % 2 : rng() % 4;
  switch (k) {
    case 0: return Term::integer(static_cast<std::int64_t>(rng() % 2001) - 1000);
    case 1: return Term::atom(atoms[rng() % 8]);
    case 2: {
      std::vector<Term> elems(rng() % 4);
      for (auto& t : elems) t = random_term(rng, depth - 1);
      return Term::list(std::move(elems));
    }
    default: {
      std::vector<Term> args(1 + rng() % 3);
      for (auto& t : args) t = random_term(rng, depth - 1);
      return Term::compound(atoms[rng() % 8], std::move(args));
    }
  }
}

}  // namespace

TEST_CASE("external ports are exactly call exit fail redo exception") {
  int external = 0;
  for (Port p : kAllPorts) {
    bool expected = p == Port::call || p == Port::exit || p == Port::fail || p == Port::redo ||
                    p == Port::exception;
    CHECK(is_external(p) == expected);
    external += is_external(p);
  }
  CHECK(external == 5);
}

TEST_CASE("port and determinism text round trips") {
  for (Port p : kAllPorts) CHECK(parse_port(to_string(p)) == p);
  CHECK(to_string(Port::cond) == "if");
  CHECK(to_string(Port::switch_) == "switch");
  CHECK(to_string(Port::else_) == "else");
  for (auto d : {Determinism::det, Determinism::semidet, Determinism::nondet, Determinism::multi,
                 Determinism::failure, Determinism::erroneous})
    CHECK(parse_determinism(to_string(d)) == d);
  CHECK_THROWS(parse_port("jump"));
  CHECK_THROWS(parse_determinism("cc_maybe"));
}

TEST_CASE("proc display form") {
  ProcId p{ProcKind::predicate, "qsort", "qsort", "partition", 4, 0};
  CHECK(p.display() == "qsort.partition/4-0");
  ProcId user{ProcKind::predicate, "user", "user", "user", 0, 0};
  CHECK(user.display() == "user.user/0-0");
}

TEST_CASE("attribute_of on the partition event") {
  Event e = partition_event();
  CHECK(std::get<std::uint64_t>(*attribute_of(e, "depth")) == 5);
  CHECK(std::get<Port>(*attribute_of(e, "port")) == Port::then);
  CHECK(std::get<std::uint64_t>(*attribute_of(e, "chrono")) == 10);
  CHECK(std::get<std::uint64_t>(*attribute_of(e, "call")) == 6);
  CHECK(std::get<std::string>(*attribute_of(e, "name")) == "partition");
  CHECK(std::get<std::uint64_t>(*attribute_of(e, "arity")) == 4);
  CHECK(std::get<std::uint64_t>(*attribute_of(e, "mode_number")) == 0);
  CHECK(std::get<ProcKind>(*attribute_of(e, "proc_type")) == ProcKind::predicate);
  CHECK(to_string(std::get<GoalPath>(*attribute_of(e, "goal_path"))) == "[s1, c2, t]");
  CHECK(to_string(Term::list(std::get<std::vector<Term>>(*attribute_of(e, "args")))) ==
        "[[1, 2], 3, -, -]");
  auto vars = std::get<std::vector<LiveVar>>(*attribute_of(e, "local_vars"));
  REQUIRE(vars.size() == 2);
  CHECK(vars[1].name == "T");
  CHECK(to_string(vars[1].value) == "[2]");
  CHECK(vars[1].type_name == "list(int)");
}

TEST_CASE("masked attributes are absent and checked accessors throw") {
  Event e = apply_mask(partition_event(), AttributeMask::defaults());
  CHECK_FALSE(attribute_of(e, "args").has_value());
  CHECK_FALSE(attribute_of(e, "line_number").has_value());
  CHECK(attribute_of(e, "arg_types").has_value());
  CHECK_THROWS_AS(e.live_args(), AttributeUnavailable);
  try {
    (void)e.live_args();
  } catch (const AttributeUnavailable& ex) {
    CHECK(ex.attribute() == "args");
    CHECK(ex.chrono() == 10);
  }
  CHECK_THROWS_AS(e.call_site_line(), AttributeUnavailable);
  CHECK(e.live_arg_types().size() == 4);
}

TEST_CASE("unknown attribute names are rejected by name") {
  Event e = partition_event();
  try {
    (void)attribute_of(e, "colour");
    FAIL("expected an exception");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("colour") != std::string::npos);
  }
}

TEST_CASE("goal path parsing") {
  CHECK(parse_goal_path("[c3, e, d1]") ==
        GoalPath{GoalPathStep::conj(3), GoalPathStep::else_branch(), GoalPathStep::disj(1)});
  CHECK(parse_goal_path("[]").empty());
  CHECK(parse_goal_path("[s1, c2, t]") ==
        GoalPath{GoalPathStep::switch_branch(1), GoalPathStep::conj(2), GoalPathStep::then()});
  CHECK(parse_goal_path("[?]") == GoalPath{GoalPathStep::cond()});
  CHECK(to_string(GoalPath{GoalPathStep::conj(3), GoalPathStep::else_branch(),
                           GoalPathStep::disj(1)}) == "[c3, e, d1]");
}

TEST_CASE("malformed goal paths report a position") {
  for (const char* bad : {"[c3, x, d1]", "[c0]", "c3", "[c3,", "[d]"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_goal_path(bad), ParseError);
  }
  try {
    parse_goal_path("[c3, x, d1]");
  } catch (const ParseError& ex) {
    CHECK(ex.column() == 6);
  }
}

TEST_CASE("term printing") {
  CHECK(to_string(Term::list({Term::integer(1), Term::list({}), Term::atom("a")})) ==
        "[1, [], a]");
  CHECK(to_string(Term::compound("f", {Term::atom("x y"), Term::integer(-3)})) == "f('x y', -3)");
  CHECK(to_string(Term::atom("[]")) == "'[]'");
  CHECK(to_string(Term::unbound()) == "-");
  CHECK(parse_term("-") == Term::unbound());
  CHECK(parse_term("-7") == Term::integer(-7));
}

TEST_CASE("property: ground terms survive print then parse") {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 500; ++i) {
    Term t = random_term(rng, 4);
    CAPTURE(to_string(t));
    CHECK(parse_term(to_string(t)) == t);
  }
}

TEST_CASE("property: goal paths survive print then parse") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    GoalPath p(rng() % 6);
    for (auto& s : p) {
      switch (rng() % 6) {
        case 0: s = GoalPathStep::conj(1 + rng() % 20); break;
        case 1: s = GoalPathStep::disj(1 + rng() % 20); break;
        case 2: s = GoalPathStep::switch_branch(1 + rng() % 20); break;
        case 3: s = GoalPathStep::cond(); break;
        case 4: s = GoalPathStep::then(); break;
        default: s = GoalPathStep::else_branch(); break;
      }
    }
    CHECK(parse_goal_path(to_string(p)) == p);
  }
}

TEST_CASE("attribute masks") {
  CHECK(AttributeMask::defaults().has(OptionalAttribute::arg_types));
  CHECK(AttributeMask::defaults().has(OptionalAttribute::local_vars));
  CHECK_FALSE(AttributeMask::defaults().has(OptionalAttribute::args));
  CHECK_FALSE(AttributeMask::defaults().has(OptionalAttribute::line_number));
  CHECK(AttributeMask::parse("args,line_number") ==
        AttributeMask::none().with(OptionalAttribute::args).with(OptionalAttribute::line_number));
  CHECK(AttributeMask::parse("all") == AttributeMask::all());
  CHECK(AttributeMask::parse("none") == AttributeMask::none());
  CHECK_THROWS(AttributeMask::parse("chrono"));
  CHECK_THROWS(AttributeMask::parse("bogus"));
}

TEST_CASE("property: generated traces satisfy the trace invariants") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto trace = testsupport::random_byrd_trace(rng, 200);
    CHECK(trace.size() <= 200);
    std::map<std::uint64_t, std::pair<std::uint32_t, ProcId>> seen;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const Event& e = trace[k];
      CHECK(e.chrono == k + 1);
      if (e.port == Port::call) {
        seen[e.call] = {e.depth, e.proc};
      } else {
        REQUIRE(seen.count(e.call));
        CHECK(seen[e.call].first == e.depth);
        CHECK(seen[e.call].second == e.proc);
      }
      if (is_external(e.port)) CHECK(e.goal_path.empty());
    }
    CHECK(testsupport::byrd_violation(trace).empty());
  }
}
