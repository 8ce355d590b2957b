#pragma once

// Trace event vocabulary: ports, determinism markers, procedure identities,
// goal paths and term values carried by each execution event.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracefold/errors.hpp"

namespace tracefold {

enum class Port : std::uint8_t {
  call,
  exit,
  fail,
  redo,
  exception,
  disj,
  switch_,
  cond,  // textual form "if"
  then,
  else_,
  first,
  later,
};

inline constexpr std::array<Port, 12> kAllPorts = {
    Port::call, Port::exit,  Port::fail, Port::redo,  Port::exception, Port::disj,
    Port::switch_, Port::cond, Port::then, Port::else_, Port::first,   Port::later,
};

constexpr bool is_external(Port p) noexcept {
  return p == Port::call || p == Port::exit || p == Port::fail || p == Port::redo ||
         p == Port::exception;
}

std::string_view to_string(Port p) noexcept;
Port parse_port(std::string_view text);

enum class Determinism : std::uint8_t { det, semidet, nondet, multi, failure, erroneous };

std::string_view to_string(Determinism d) noexcept;
Determinism parse_determinism(std::string_view text);

enum class ProcKind : std::uint8_t { predicate, function };

std::string_view to_string(ProcKind k) noexcept;
ProcKind parse_proc_kind(std::string_view text);

struct ProcId {
  ProcKind kind = ProcKind::predicate;
  std::string def_module;
  std::string decl_module;
  std::string name;
  std::uint32_t arity = 0;
  std::uint32_t mode_number = 0;

  // decl_module.name/arity-mode_number
  std::string display() const;

  friend bool operator==(const ProcId&, const ProcId&) = default;
  friend auto operator<=>(const ProcId&, const ProcId&) = default;
};

// Snapshot of a runtime value. Unbound positions carry the `unbound` kind and
// print as `-`.
struct Term {
  enum class Kind : std::uint8_t { integer, atom, list, compound, unbound };

  Kind kind = Kind::unbound;
  std::int64_t value = 0;   // integer
  std::string name;         // atom text or compound functor
  std::vector<Term> args;   // list elements or compound arguments

  static Term integer(std::int64_t v) { return Term{Kind::integer, v, {}, {}}; }
  static Term atom(std::string text) { return Term{Kind::atom, 0, std::move(text), {}}; }
  static Term list(std::vector<Term> elems) { return Term{Kind::list, 0, {}, std::move(elems)}; }
  static Term compound(std::string functor, std::vector<Term> a) {
    return Term{Kind::compound, 0, std::move(functor), std::move(a)};
  }
  static Term unbound() { return Term{}; }

  bool is_unbound() const noexcept { return kind == Kind::unbound; }
  bool is_ground() const noexcept;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

std::string to_string(const Term& t);
void print_term(std::string& out, const Term& t);
Term parse_term(std::string_view text);

struct LiveVar {
  std::string name;
  Term value;
  std::string type_name;

  friend bool operator==(const LiveVar&, const LiveVar&) = default;
};

struct GoalPathStep {
  enum class Kind : std::uint8_t { conj, disj, switch_, cond, then, else_ };

  Kind kind = Kind::conj;
  std::uint32_t index = 0;  // branch number for conj/disj/switch, 0 otherwise

  static GoalPathStep conj(std::uint32_t i) { return {Kind::conj, i}; }
  static GoalPathStep disj(std::uint32_t i) { return {Kind::disj, i}; }
  static GoalPathStep switch_branch(std::uint32_t i) { return {Kind::switch_, i}; }
  static GoalPathStep cond() { return {Kind::cond, 0}; }
  static GoalPathStep then() { return {Kind::then, 0}; }
  static GoalPathStep else_branch() { return {Kind::else_, 0}; }

  friend bool operator==(const GoalPathStep&, const GoalPathStep&) = default;
};

using GoalPath = std::vector<GoalPathStep>;

std::string to_string(const GoalPathStep& step);
GoalPathStep parse_goal_path_step(std::string_view text);
// Outermost step first: "[c3, e, d1]".
std::string to_string(const GoalPath& path);
GoalPath parse_goal_path(std::string_view text);

// The optional (costly) attributes. Mandatory attributes are always present.
enum class OptionalAttribute : std::uint8_t { args, arg_types, local_vars, line_number };

inline constexpr std::array<OptionalAttribute, 4> kOptionalAttributes = {
    OptionalAttribute::args, OptionalAttribute::arg_types, OptionalAttribute::local_vars,
    OptionalAttribute::line_number};

std::string_view to_string(OptionalAttribute a) noexcept;
std::optional<OptionalAttribute> parse_optional_attribute(std::string_view text) noexcept;

class AttributeMask {
 public:
  constexpr AttributeMask() = default;

  static constexpr AttributeMask none() { return AttributeMask{}; }
  static constexpr AttributeMask all() { return AttributeMask{0x0F}; }
  // Everything except the live arguments and the line number.
  static constexpr AttributeMask defaults() {
    return none().with(OptionalAttribute::arg_types).with(OptionalAttribute::local_vars);
  }
  // Comma separated attribute names; "all" and "none" are accepted.
  static AttributeMask parse(std::string_view text);

  constexpr bool has(OptionalAttribute a) const noexcept { return (bits_ >> bit(a)) & 1U; }
  constexpr AttributeMask with(OptionalAttribute a) const noexcept {
    return AttributeMask(static_cast<std::uint8_t>(bits_ | (1U << bit(a))));
  }
  constexpr AttributeMask without(OptionalAttribute a) const noexcept {
    return AttributeMask(static_cast<std::uint8_t>(bits_ & ~(1U << bit(a))));
  }
  constexpr AttributeMask intersect(AttributeMask o) const noexcept {
    return AttributeMask(static_cast<std::uint8_t>(bits_ & o.bits_));
  }

  std::vector<std::string> names() const;

  friend constexpr bool operator==(AttributeMask, AttributeMask) = default;

 private:
  constexpr explicit AttributeMask(std::uint8_t bits) : bits_(bits) {}
  static constexpr unsigned bit(OptionalAttribute a) { return static_cast<unsigned>(a); }

  std::uint8_t bits_ = 0;
};

struct Event {
  std::uint64_t chrono = 0;
  std::uint64_t call = 0;
  std::uint32_t depth = 0;
  Port port = Port::call;
  Determinism det = Determinism::det;
  ProcId proc;
  GoalPath goal_path;

  // Which optional attributes were enabled when this event was produced.
  AttributeMask mask = AttributeMask::none();
  std::optional<std::vector<Term>> args;
  std::optional<std::vector<std::string>> arg_types;
  std::optional<std::vector<LiveVar>> local_vars;
  // Present iff the mask enables it and the goal has a call site in the
  // program (top-level query goals have none).
  std::optional<std::uint32_t> line_number;

  // Checked accessors: throw AttributeUnavailable when masked off.
  const std::vector<Term>& live_args() const;
  const std::vector<std::string>& live_arg_types() const;
  const std::vector<LiveVar>& live_local_vars() const;
  std::optional<std::uint32_t> call_site_line() const;

  friend bool operator==(const Event&, const Event&) = default;
};

// Drops the attributes not enabled in `mask`.
Event apply_mask(Event event, AttributeMask mask);

using AttributeValue =
    std::variant<std::uint64_t, Port, Determinism, ProcKind, std::string, std::vector<Term>,
                 std::vector<std::string>, std::vector<LiveVar>, GoalPath>;

// Generic accessor by attribute name. Returns nullopt for masked attributes
// (and for line_number on goals without a call site); throws
// std::invalid_argument naming unknown attributes.
std::optional<AttributeValue> attribute_of(const Event& event, std::string_view name);

}  // namespace tracefold
