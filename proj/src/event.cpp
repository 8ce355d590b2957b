#include "tracefold/event.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace tracefold {

namespace {

constexpr std::array<std::string_view, 12> kPortNames = {
    "call", "exit", "fail", "redo", "exception", "disj",
    "switch", "if", "then", "else", "first", "later"};

constexpr std::array<std::string_view, 6> kDetNames = {"det",   "semidet", "nondet",
                                                       "multi", "failure", "erroneous"};

constexpr std::array<std::string_view, 4> kAttrNames = {"args", "arg_types", "local_vars",
                                                        "line_number"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_bare_atom(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

void print_atom(std::string& out, std::string_view s) {
  if (is_bare_atom(s)) {
    out += s;
    return;
  }
  out += '\'';
  for (char c : s) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '\'';
}

class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  Term read_all() {
    Term t = read();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("term: " + what, 1, pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Term read() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '[') return read_list();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      bool neg = c == '-';
      if (neg) {
        if (pos_ + 1 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
          ++pos_;
          return Term::unbound();
        }
        ++pos_;
      }
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::int64_t v = 0;
      auto digits = text_.substr(start, pos_ - start);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{}) fail("integer out of range");
      return Term::integer(neg ? -v : v);
    }
    std::string name = read_atom_text();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::vector<Term> args;
      args.push_back(read());
      while (peek(',')) {
        ++pos_;
        args.push_back(read());
      }
      expect(')');
      return Term::compound(std::move(name), std::move(args));
    }
    return Term::atom(std::move(name));
  }

  Term read_list() {
    expect('[');
    std::vector<Term> elems;
    if (peek(']')) {
      ++pos_;
      return Term::list({});
    }
    elems.push_back(read());
    while (peek(',')) {
      ++pos_;
      elems.push_back(read());
    }
    expect(']');
    return Term::list(std::move(elems));
  }

  std::string read_atom_text() {
    char c = text_[pos_];
    if (c == '\'') {
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated quoted atom");
        char d = text_[pos_++];
        if (d == '\'') break;
        if (d == '\\') {
          if (pos_ >= text_.size()) fail("dangling escape");
          char e = text_[pos_++];
          switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case '\\': out += '\\'; break;
            case '\'': out += '\''; break;
            default: fail(std::string("unknown escape \\") + e);
          }
        } else {
          out += d;
        }
      }
      return out;
    }
    if (!std::islower(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(Port p) noexcept { return kPortNames[static_cast<std::size_t>(p)]; }

Port parse_port(std::string_view text) {
  for (std::size_t i = 0; i < kPortNames.size(); ++i)
    if (kPortNames[i] == text) return static_cast<Port>(i);
  throw std::invalid_argument("unknown port '" + std::string(text) + "'");
}

std::string_view to_string(Determinism d) noexcept {
  return kDetNames[static_cast<std::size_t>(d)];
}

Determinism parse_determinism(std::string_view text) {
  for (std::size_t i = 0; i < kDetNames.size(); ++i)
    if (kDetNames[i] == text) return static_cast<Determinism>(i);
  throw std::invalid_argument("unknown determinism '" + std::string(text) + "'");
}

std::string_view to_string(ProcKind k) noexcept {
  return k == ProcKind::predicate ? "predicate" : "function";
}

ProcKind parse_proc_kind(std::string_view text) {
  if (text == "predicate") return ProcKind::predicate;
  if (text == "function") return ProcKind::function;
  throw std::invalid_argument("unknown procedure kind '" + std::string(text) + "'");
}

std::string ProcId::display() const {
  return decl_module + "." + name + "/" + std::to_string(arity) + "-" + std::to_string(mode_number);
}

bool Term::is_ground() const noexcept {
  if (kind == Kind::unbound) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.value <=> b.value; c != 0) return c;
  if (auto c = a.name.compare(b.name); c != 0) return c <=> 0;
  return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                b.args.end());
}

void print_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case Term::Kind::integer: out += std::to_string(t.value); break;
    case Term::Kind::unbound: out += '-'; break;
    case Term::Kind::atom:
      // "[]" as an atom must not read back as the empty list
      if (t.name == "[]")
        out += "'[]'";
      else
        print_atom(out, t.name);
      break;
    case Term::Kind::list:
      out += '[';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        print_term(out, t.args[i]);
      }
      out += ']';
      break;
    case Term::Kind::compound:
      print_atom(out, t.name);
      out += '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        print_term(out, t.args[i]);
      }
      out += ')';
      break;
  }
}

std::string to_string(const Term& t) {
  std::string out;
  print_term(out, t);
  return out;
}

Term parse_term(std::string_view text) { return TermReader(text).read_all(); }

std::string to_string(const GoalPathStep& step) {
  switch (step.kind) {
    case GoalPathStep::Kind::conj: return "c" + std::to_string(step.index);
    case GoalPathStep::Kind::disj: return "d" + std::to_string(step.index);
    case GoalPathStep::Kind::switch_: return "s" + std::to_string(step.index);
    case GoalPathStep::Kind::cond: return "?";
    case GoalPathStep::Kind::then: return "t";
    case GoalPathStep::Kind::else_: return "e";
  }
  return "?";
}

GoalPathStep parse_goal_path_step(std::string_view text) {
  text = trim(text);
  if (text == "?") return GoalPathStep::cond();
  if (text == "t") return GoalPathStep::then();
  if (text == "e") return GoalPathStep::else_branch();
  if (text.size() >= 2 && (text[0] == 'c' || text[0] == 'd' || text[0] == 's')) {
    std::uint32_t i = 0;
    auto digits = text.substr(1);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec == std::errc{} && p == digits.data() + digits.size() && i > 0) {
      switch (text[0]) {
        case 'c': return GoalPathStep::conj(i);
        case 'd': return GoalPathStep::disj(i);
        default: return GoalPathStep::switch_branch(i);
      }
    }
  }
  throw std::invalid_argument("malformed goal path step '" + std::string(text) + "'");
}

std::string to_string(const GoalPath& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ", ";
    out += to_string(path[i]);
  }
  out += ']';
  return out;
}

GoalPath parse_goal_path(std::string_view text) {
  std::string_view body = trim(text);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw ParseError("goal path must be a bracketed list", 1, 1);
  std::size_t offset = static_cast<std::size_t>(body.data() - text.data()) + 1;
  body = body.substr(1, body.size() - 2);
  GoalPath path;
  if (trim(body).empty()) return path;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = body.find(',', start);
    auto piece = body.substr(start, comma == std::string_view::npos ? body.npos : comma - start);
    try {
      path.push_back(parse_goal_path_step(piece));
    } catch (const std::invalid_argument& e) {
      auto lead = piece.find_first_not_of(" \t");
      throw ParseError(e.what(), 1, offset + start + (lead == piece.npos ? 0 : lead) + 1);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return path;
}

std::string_view to_string(OptionalAttribute a) noexcept {
  return kAttrNames[static_cast<std::size_t>(a)];
}

std::optional<OptionalAttribute> parse_optional_attribute(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kAttrNames.size(); ++i)
    if (kAttrNames[i] == text) return static_cast<OptionalAttribute>(i);
  if (text == "line") return OptionalAttribute::line_number;
  return std::nullopt;
}

AttributeMask AttributeMask::parse(std::string_view text) {
  text = trim(text);
  if (text == "all") return all();
  if (text == "none" || text.empty()) return none();
  AttributeMask m;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    auto piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    auto attr = parse_optional_attribute(piece);
    if (!attr) {
      static constexpr std::array<std::string_view, 7> mandatory = {
          "chrono", "call", "depth", "port", "det", "proc", "goal_path"};
      if (std::find(mandatory.begin(), mandatory.end(), piece) != mandatory.end())
        throw std::invalid_argument("attribute '" + std::string(piece) +
                                    "' is mandatory and cannot be masked");
      throw std::invalid_argument("unknown attribute '" + std::string(piece) + "' in mask");
    }
    m = m.with(*attr);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return m;
}

std::vector<std::string> AttributeMask::names() const {
  std::vector<std::string> out;
  for (auto a : kOptionalAttributes)
    if (has(a)) out.emplace_back(to_string(a));
  return out;
}

const std::vector<Term>& Event::live_args() const {
  if (!mask.has(OptionalAttribute::args) || !args) throw AttributeUnavailable("args", chrono);
  return *args;
}

const std::vector<std::string>& Event::live_arg_types() const {
  if (!mask.has(OptionalAttribute::arg_types) || !arg_types)
    throw AttributeUnavailable("arg_types", chrono);
  return *arg_types;
}

const std::vector<LiveVar>& Event::live_local_vars() const {
  if (!mask.has(OptionalAttribute::local_vars) || !local_vars)
    throw AttributeUnavailable("local_vars", chrono);
  return *local_vars;
}

std::optional<std::uint32_t> Event::call_site_line() const {
  if (!mask.has(OptionalAttribute::line_number)) throw AttributeUnavailable("line_number", chrono);
  return line_number;
}

Event apply_mask(Event event, AttributeMask mask) {
  event.mask = event.mask.intersect(mask);
  if (!event.mask.has(OptionalAttribute::args)) event.args.reset();
  if (!event.mask.has(OptionalAttribute::arg_types)) event.arg_types.reset();
  if (!event.mask.has(OptionalAttribute::local_vars)) event.local_vars.reset();
  if (!event.mask.has(OptionalAttribute::line_number)) event.line_number.reset();
  return event;
}

std::optional<AttributeValue> attribute_of(const Event& e, std::string_view name) {
  if (name == "chrono") return e.chrono;
  if (name == "call") return e.call;
  if (name == "depth") return std::uint64_t{e.depth};
  if (name == "port") return e.port;
  if (name == "det") return e.det;
  if (name == "proc_type") return e.proc.kind;
  if (name == "def_module") return e.proc.def_module;
  if (name == "decl_module") return e.proc.decl_module;
  if (name == "name") return e.proc.name;
  if (name == "arity") return std::uint64_t{e.proc.arity};
  if (name == "mode_number") return std::uint64_t{e.proc.mode_number};
  if (name == "goal_path") return e.goal_path;
  if (name == "args") {
    if (!e.args) return std::nullopt;
    return *e.args;
  }
  if (name == "arg_types") {
    if (!e.arg_types) return std::nullopt;
    return *e.arg_types;
  }
  if (name == "local_vars") {
    if (!e.local_vars) return std::nullopt;
    return *e.local_vars;
  }
  if (name == "line_number") {
    if (!e.line_number) return std::nullopt;
    return std::uint64_t{*e.line_number};
  }
  throw std::invalid_argument("unknown event attribute '" + std::string(name) + "'");
}

}  // namespace tracefold
