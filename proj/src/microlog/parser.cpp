#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tracefold/microlog.hpp"

namespace tracefold::microlog {

namespace {

struct Token {
  enum class Kind : std::uint8_t { atom, var, integer, punct, end, eof };
  Kind kind = Kind::eof;
  std::string text;
  std::int64_t value = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  bool quoted = false;
  bool layout_before = false;
};

constexpr std::string_view kSymbolChars = "+-*/\\^<>=~:.?@#&$";

bool is_symbol_char(char c) { return kSymbolChars.find(c) != std::string_view::npos; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      bool layout = skip_layout();
      Token t = lex_one();
      t.layout_before = layout;
      out.push_back(t);
      if (t.kind == Token::Kind::eof) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool skip_layout() {
    bool any = false;
    while (pos_ < text_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        any = true;
      } else if (c == '%') {
        while (pos_ < text_.size() && peek() != '\n') advance();
        any = true;
      } else if (c == '/' && peek(1) == '*') {
        std::uint32_t l = line_, cl = col_;
        advance();
        advance();
        while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= text_.size()) throw ParseError("unterminated block comment", l, cl);
        advance();
        advance();
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  Token lex_one() {
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= text_.size()) return t;
    char c = peek();
    auto is_ident = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      auto digits = text_.substr(start, pos_ - start);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.value);
      if (ec != std::errc{}) throw ParseError("integer literal out of range", t.line, t.column);
      t.kind = Token::Kind::integer;
      t.text = std::string(digits);
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (is_ident(peek())) advance();
      t.kind = Token::Kind::var;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (is_ident(peek())) advance();
      t.kind = Token::Kind::atom;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (c == '\'') {
      advance();
      std::string s;
      while (true) {
        if (pos_ >= text_.size()) throw ParseError("unterminated quoted atom", t.line, t.column);
        char d = advance();
        if (d == '\'') {
          if (peek() == '\'') {
            advance();
            s += '\'';
            continue;
          }
          break;
        }
        if (d == '\\') {
          if (pos_ >= text_.size()) fail("dangling escape in quoted atom");
          char e = advance();
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '\\': s += '\\'; break;
            case '\'': s += '\''; break;
            default: fail(std::string("unknown escape \\") + e);
          }
          continue;
        }
        s += d;
      }
      t.kind = Token::Kind::atom;
      t.text = std::move(s);
      t.quoted = true;
      return t;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '|' || c == ',' || c == ';' ||
        c == '!' || c == '{' || c == '}') {
      advance();
      t.kind = Token::Kind::punct;
      t.text = std::string(1, c);
      return t;
    }
    if (c == '.') {
      char n = peek(1);
      if (n == '\0' || std::isspace(static_cast<unsigned char>(n)) || n == '%') {
        advance();
        t.kind = Token::Kind::end;
        t.text = ".";
        return t;
      }
    }
    if (is_symbol_char(c)) {
      std::size_t start = pos_;
      while (is_symbol_char(peek())) {
        if (peek() == '.') {
          char n = peek(1);
          if (n == '\0' || std::isspace(static_cast<unsigned char>(n)) || n == '%') break;
        }
        advance();
      }
      t.kind = Token::Kind::atom;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

enum class OpType : std::uint8_t { xfx, xfy, yfx, fx, fy };

struct OpDef {
  int prec;
  OpType type;
};

const std::map<std::string, OpDef, std::less<>>& infix_ops() {
  static const std::map<std::string, OpDef, std::less<>> ops = {
      {":-", {1200, OpType::xfx}},  {"-->", {1200, OpType::xfx}}, {";", {1100, OpType::xfy}},
      {"->", {1050, OpType::xfy}},  {",", {1000, OpType::xfy}},   {"=", {700, OpType::xfx}},
      {"\\=", {700, OpType::xfx}},  {"is", {700, OpType::xfx}},   {"<", {700, OpType::xfx}},
      {">", {700, OpType::xfx}},    {"=<", {700, OpType::xfx}},   {">=", {700, OpType::xfx}},
      {"=:=", {700, OpType::xfx}},  {"=\\=", {700, OpType::xfx}}, {"+", {500, OpType::yfx}},
      {"-", {500, OpType::yfx}},    {"*", {400, OpType::yfx}},    {"//", {400, OpType::yfx}},
      {"/", {400, OpType::yfx}},    {"mod", {400, OpType::yfx}},
  };
  return ops;
}

const std::map<std::string, OpDef, std::less<>>& prefix_ops() {
  static const std::map<std::string, OpDef, std::less<>> ops = {
      {":-", {1200, OpType::fx}},        {"-", {200, OpType::fy}},
      {"\\+", {900, OpType::fy}},        {"module", {1150, OpType::fx}},
      {"determinism", {1150, OpType::fx}},
  };
  return ops;
}

class Reader {
 public:
  explicit Reader(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  bool at_eof() const { return cur().kind == Token::Kind::eof; }

  // Reads one clause term terminated by '.'. Variable names are kept in
  // TermAst::name; numbering happens later.
  TermAst read_clause(bool allow_missing_end = false) {
    TermAst t = parse(1200);
    if (cur().kind == Token::Kind::end) {
      ++pos_;
    } else if (!(allow_missing_end && cur().kind == Token::Kind::eof)) {
      fail_here("expected '.' at end of clause");
    }
    return t;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    const Token& t = cur();
    std::string found = t.kind == Token::Kind::eof ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, t.line, t.column);
  }

  [[noreturn]] static void unsupported(const std::string& what, const Token& t) {
    throw ParseError("unsupported construct: " + what, t.line, t.column);
  }

  bool is_punct(const Token& t, char c) const {
    return t.kind == Token::Kind::punct && t.text.size() == 1 && t.text[0] == c;
  }

  void expect_punct(char c) {
    if (!is_punct(cur(), c)) fail_here(std::string("expected '") + c + "'");
    ++pos_;
  }

  // Name of the infix operator at the current token, if any.
  std::optional<std::pair<std::string, OpDef>> infix_here() const {
    const Token& t = cur();
    std::string name;
    if (t.kind == Token::Kind::punct && (t.text == "," || t.text == ";"))
      name = t.text;
    else if (t.kind == Token::Kind::atom && !t.quoted)
      name = t.text;
    else
      return std::nullopt;
    auto it = infix_ops().find(name);
    if (it == infix_ops().end()) return std::nullopt;
    return *it;
  }

  bool can_start_term(const Token& t) const {
    switch (t.kind) {
      case Token::Kind::atom:
        return t.quoted || !infix_ops().contains(t.text) || prefix_ops().contains(t.text);
      case Token::Kind::var:
      case Token::Kind::integer: return true;
      case Token::Kind::punct: return t.text == "(" || t.text == "[" || t.text == "!";
      default: return false;
    }
  }

  static TermAst make(TermAst::Kind kind, const Token& at) {
    TermAst a;
    a.kind = kind;
    a.line = at.line;
    a.column = at.column;
    return a;
  }

  TermAst parse(int max_prec) {
    auto [left, left_prec] = parse_primary(max_prec);
    while (true) {
      auto op = infix_here();
      if (!op) break;
      const auto& [name, def] = *op;
      int left_max = def.type == OpType::yfx ? def.prec : def.prec - 1;
      int right_max = def.type == OpType::xfy ? def.prec : def.prec - 1;
      if (def.prec > max_prec || left_prec > left_max) break;
      const Token& op_tok = cur();
      if (name == "-->") unsupported("DCG rule (-->)", op_tok);
      ++pos_;
      TermAst right = parse(right_max);
      TermAst node = make(TermAst::Kind::compound, op_tok);
      node.name = name;
      node.line = left.line;
      node.column = left.column;
      node.args.push_back(std::move(left));
      node.args.push_back(std::move(right));
      left = std::move(node);
      left_prec = def.prec;
    }
    return std::move(left);
  }

  std::pair<TermAst, int> parse_primary(int max_prec) {
    const Token& t = cur();
    switch (t.kind) {
      case Token::Kind::integer: {
        TermAst a = make(TermAst::Kind::integer, t);
        a.value = t.value;
        ++pos_;
        return {a, 0};
      }
      case Token::Kind::var: {
        TermAst a = make(TermAst::Kind::var, t);
        a.name = t.text;
        ++pos_;
        return {a, 0};
      }
      case Token::Kind::punct: {
        if (t.text == "(") {
          ++pos_;
          TermAst inner = parse(1200);
          expect_punct(')');
          return {inner, 0};
        }
        if (t.text == "[") return {parse_list(), 0};
        if (t.text == "!") unsupported("cut (!)", t);
        if (t.text == "{") unsupported("curly term {}", t);
        fail_here("unexpected token");
      }
      case Token::Kind::atom: return parse_atom_or_compound(max_prec);
      case Token::Kind::end: fail_here("unexpected end of clause");
      case Token::Kind::eof: fail_here("unexpected end of input");
    }
    fail_here("unexpected token");
  }

  std::pair<TermAst, int> parse_atom_or_compound(int max_prec) {
    const Token& t = cur();
    const Token& next = ahead();
    if (!t.quoted && t.text == "\\+") unsupported("negation as failure (\\+)", t);
    if (is_punct(next, '(') && !next.layout_before) {
      ++pos_;
      ++pos_;
      TermAst a = make(TermAst::Kind::compound, t);
      a.name = t.text;
      a.args.push_back(parse(999));
      while (is_punct(cur(), ',')) {
        ++pos_;
        a.args.push_back(parse(999));
      }
      expect_punct(')');
      return {a, 0};
    }
    if (!t.quoted) {
      auto pit = prefix_ops().find(t.text);
      if (pit != prefix_ops().end() && can_start_term(next)) {
        if (t.text == "-" && next.kind == Token::Kind::integer && !next.layout_before) {
          TermAst a = make(TermAst::Kind::integer, t);
          a.value = -next.value;
          pos_ += 2;
          return {a, 0};
        }
        const OpDef& def = pit->second;
        int prec = def.prec <= max_prec ? def.prec : 999;
        int arg_max = def.type == OpType::fy ? prec : prec - 1;
        ++pos_;
        TermAst operand = parse(arg_max);
        TermAst a = make(TermAst::Kind::compound, t);
        a.name = t.text;
        a.args.push_back(std::move(operand));
        return {a, prec};
      }
    }
    TermAst a = make(TermAst::Kind::atom, t);
    a.name = t.text;
    ++pos_;
    int prec = 0;
    if (!t.quoted) {
      if (auto it = infix_ops().find(t.text); it != infix_ops().end()) prec = it->second.prec;
      if (prec > max_prec) prec = 0;
    }
    return {a, prec};
  }

  TermAst parse_list() {
    const Token& open = cur();
    expect_punct('[');
    if (is_punct(cur(), ']')) {
      ++pos_;
      TermAst nil = make(TermAst::Kind::atom, open);
      nil.name = "[]";
      return nil;
    }
    std::vector<TermAst> elems;
    elems.push_back(parse(999));
    while (is_punct(cur(), ',')) {
      ++pos_;
      elems.push_back(parse(999));
    }
    TermAst tail = make(TermAst::Kind::atom, cur());
    tail.name = "[]";
    if (is_punct(cur(), '|')) {
      ++pos_;
      tail = parse(999);
    }
    expect_punct(']');
    for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
      TermAst cell = make(TermAst::Kind::compound, open);
      cell.line = it->line;
      cell.column = it->column;
      cell.name = "[|]";
      cell.args.push_back(std::move(*it));
      cell.args.push_back(std::move(tail));
      tail = std::move(cell);
    }
    return tail;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_functor(const TermAst& t, std::string_view name, std::size_t arity) {
  if (arity == 0) return t.kind == TermAst::Kind::atom && t.name == name;
  return t.kind == TermAst::Kind::compound && t.name == name && t.args.size() == arity;
}

// Assigns clause-local variable numbers.
class VarNumbering {
 public:
  void number(TermAst& t) {
    if (t.kind == TermAst::Kind::var) {
      if (t.name == "_") {
        t.var = static_cast<std::uint32_t>(names_.size());
        names_.push_back("_");
        return;
      }
      auto [it, inserted] = index_.try_emplace(t.name, static_cast<std::uint32_t>(names_.size()));
      if (inserted) names_.push_back(t.name);
      t.var = it->second;
      return;
    }
    for (auto& a : t.args) number(a);
  }

  std::uint32_t count() const { return static_cast<std::uint32_t>(names_.size()); }
  std::vector<std::string> names() const { return names_; }

 private:
  std::map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
};

GoalPath extend(const GoalPath& p, GoalPathStep s) {
  GoalPath out = p;
  out.push_back(s);
  return out;
}

void flatten(const TermAst& t, std::string_view op, std::vector<const TermAst*>& out) {
  if (is_functor(t, op, 2)) {
    flatten(t.args[0], op, out);
    flatten(t.args[1], op, out);
  } else {
    out.push_back(&t);
  }
}

// Disjunction branches of a right-nested ';' chain. An if-then-else in the
// right operand stays one branch.
void flatten_disj(const TermAst& t, std::vector<const TermAst*>& out) {
  const TermAst* cur = &t;
  while (is_functor(*cur, ";", 2) && !is_functor(cur->args[0], "->", 2)) {
    out.push_back(&cur->args[0]);
    cur = &cur->args[1];
  }
  out.push_back(cur);
}

Goal to_goal(const TermAst& t, const GoalPath& path, bool top_level_query) {
  auto err = [&](const std::string& what) -> ParseError { return ParseError(what, t.line, t.column); };
  if (t.kind == TermAst::Kind::var) throw err("unsupported construct: variable used as a goal (call/N)");
  if (t.kind == TermAst::Kind::integer) throw err("integer is not a callable goal");

  Goal g;
  g.path = path;
  if (is_functor(t, ",", 2)) {
    std::vector<const TermAst*> parts;
    flatten(t, ",", parts);
    g.kind = Goal::Kind::conj;
    for (std::size_t i = 0; i < parts.size(); ++i)
      g.children.push_back(to_goal(*parts[i], extend(path, GoalPathStep::conj(i + 1)), top_level_query));
    return g;
  }
  if (is_functor(t, ";", 2) && is_functor(t.args[0], "->", 2)) {
    g.kind = Goal::Kind::if_then_else;
    g.children.push_back(to_goal(t.args[0].args[0], extend(path, GoalPathStep::cond()), top_level_query));
    g.children.push_back(to_goal(t.args[0].args[1], extend(path, GoalPathStep::then()), top_level_query));
    g.children.push_back(to_goal(t.args[1], extend(path, GoalPathStep::else_branch()), top_level_query));
    return g;
  }
  if (is_functor(t, ";", 2)) {
    std::vector<const TermAst*> branches;
    flatten_disj(t, branches);
    g.kind = Goal::Kind::disj;
    for (std::size_t i = 0; i < branches.size(); ++i)
      g.children.push_back(to_goal(*branches[i], extend(path, GoalPathStep::disj(i + 1)), top_level_query));
    return g;
  }
  if (is_functor(t, "->", 2)) {
    g.kind = Goal::Kind::if_then_else;
    g.has_else = false;
    g.children.push_back(to_goal(t.args[0], extend(path, GoalPathStep::cond()), top_level_query));
    g.children.push_back(to_goal(t.args[1], extend(path, GoalPathStep::then()), top_level_query));
    return g;
  }
  static const std::set<std::string, std::less<>> kDatabase = {"assert", "asserta", "assertz",
                                                               "retract", "retractall"};
  if (kDatabase.contains(t.name)) throw err("unsupported construct: database update (" + t.name + ")");
  if (t.name == "\\+" || t.name == "not") throw err("unsupported construct: negation as failure");
  if (t.name == "!") throw err("unsupported construct: cut (!)");

  g.name = t.name;
  g.args = t.args;
  if (!top_level_query) g.line = t.line;
  g.column = t.column;
  auto arity = static_cast<std::uint32_t>(t.args.size());
  const auto& table = builtin_table();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].name == t.name && table[i].arity == arity) {
      g.kind = Goal::Kind::builtin;
      g.target = i;
      return g;
    }
  }
  g.kind = Goal::Kind::call;
  return g;
}

void resolve(Goal& g, const Program& prog) {
  if (g.kind == Goal::Kind::call) {
    auto idx = prog.index_of(g.name, static_cast<std::uint32_t>(g.args.size()));
    if (!idx)
      throw ParseError("unknown predicate " + g.name + "/" + std::to_string(g.args.size()),
                       g.line.value_or(1), g.column);
    g.target = *idx;
    return;
  }
  for (auto& c : g.children) resolve(c, prog);
}

struct Declaration {
  std::string name;
  std::uint32_t arity;
  Determinism det;
  bool committed;
  std::uint32_t line;
  std::uint32_t column;
};

void apply_directive(const TermAst& d, Program& prog, std::vector<Declaration>& decls) {
  auto err = [&](const std::string& what) { return ParseError(what, d.line, d.column); };
  if (is_functor(d, "module", 1) && d.args[0].kind == TermAst::Kind::atom) {
    prog.module = d.args[0].name;
    return;
  }
  if (is_functor(d, "determinism", 1)) {
    const TermAst& body = d.args[0];
    if (!is_functor(body, "is", 2) || !is_functor(body.args[0], "/", 2) ||
        body.args[0].args[0].kind != TermAst::Kind::atom ||
        body.args[0].args[1].kind != TermAst::Kind::integer ||
        body.args[1].kind != TermAst::Kind::atom)
      throw err("malformed determinism declaration, expected ':- determinism name/arity is det.'");
    std::string det_text = body.args[1].name;
    bool committed = false;
    if (det_text == "cc_multi" || det_text == "cc_nondet") {
      committed = true;
      det_text = det_text.substr(3);
    }
    Determinism det;
    try {
      det = parse_determinism(det_text);
    } catch (const std::invalid_argument&) {
      throw err("unknown determinism '" + body.args[1].name + "'");
    }
    decls.push_back(Declaration{body.args[0].args[0].name,
                                static_cast<std::uint32_t>(body.args[0].args[1].value), det,
                                committed, d.line, d.column});
    return;
  }
  std::string what = d.kind == TermAst::Kind::compound ? d.name + "/" + std::to_string(d.args.size())
                                                       : d.name;
  throw err("unsupported directive " + what);
}

}  // namespace

Program parse_program(std::string_view text, const std::string& default_module) {
  Program prog;
  prog.module = default_module;
  Reader reader(Lexer(text).tokenize());
  std::vector<Declaration> decls;

  while (!reader.at_eof()) {
    TermAst term = reader.read_clause();
    if (is_functor(term, ":-", 1)) {
      apply_directive(term.args[0], prog, decls);
      continue;
    }
    TermAst head;
    std::optional<TermAst> body;
    if (is_functor(term, ":-", 2)) {
      head = term.args[0];
      body = term.args[1];
    } else {
      head = term;
    }
    if (head.kind != TermAst::Kind::atom && head.kind != TermAst::Kind::compound)
      throw ParseError("clause head must be an atom or compound term", head.line, head.column);
    auto arity = static_cast<std::uint32_t>(head.args.size());
    if (builtin_determinism(head.name, arity))
      throw ParseError("cannot redefine built-in " + head.name + "/" + std::to_string(arity),
                       head.line, head.column);
    if (head.name == "," || head.name == ";" || head.name == "->")
      throw ParseError("control construct used as clause head", head.line, head.column);

    VarNumbering numbering;
    numbering.number(head);
    if (body) numbering.number(*body);

    Clause clause;
    clause.line = head.line;
    clause.head = head;
    clause.num_vars = numbering.count();
    clause.var_names = numbering.names();
    clause.is_head_arg_var.assign(clause.num_vars, false);
    for (const auto& a : head.args)
      if (a.kind == TermAst::Kind::var) clause.is_head_arg_var[a.var] = true;
    if (body) clause.body = to_goal(*body, {}, false);

    auto idx = prog.index_of(head.name, arity);
    if (!idx) {
      Predicate p;
      p.name = head.name;
      p.arity = arity;
      p.proc = ProcId{ProcKind::predicate, prog.module, prog.module, head.name, arity, 0};
      prog.predicates.push_back(std::move(p));
      idx = prog.predicates.size() - 1;
    }
    prog.predicates[*idx].clauses.push_back(std::move(clause));
  }

  for (auto& p : prog.predicates) {
    p.proc.def_module = prog.module;
    p.proc.decl_module = prog.module;
  }

  for (const auto& d : decls) {
    auto idx = prog.index_of(d.name, d.arity);
    if (!idx) {
      if (builtin_determinism(d.name, d.arity)) continue;
      throw ParseError("determinism declared for undefined predicate " + d.name + "/" +
                           std::to_string(d.arity),
                       d.line, d.column);
    }
    auto& p = prog.predicates[*idx];
    p.det = d.det;
    p.declared = true;
    p.committed_choice = d.committed;
  }

  for (auto& p : prog.predicates)
    for (auto& c : p.clauses)
      if (c.body) resolve(*c.body, prog);
  return prog;
}

Program load_program(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open program file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_program(ss.str(), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path.filename().string());
  }
}

Query parse_query(std::string_view text, const Program& program) {
  Reader reader(Lexer(text).tokenize());
  TermAst term = reader.read_clause(true);
  if (!reader.at_eof()) throw ParseError("trailing input after query", 1, 1);

  if (term.kind == TermAst::Kind::atom && !program.find(term.name, 0) &&
      !builtin_determinism(term.name, 0)) {
    const Predicate* only = nullptr;
    int matches = 0;
    for (const auto& p : program.predicates)
      if (p.name == term.name) {
        only = &p;
        ++matches;
      }
    if (matches == 1) {
      term.kind = TermAst::Kind::compound;
      for (std::uint32_t i = 0; i < only->arity; ++i) {
        TermAst v;
        v.kind = TermAst::Kind::var;
        v.name = "_";
        term.args.push_back(v);
      }
    }
  }

  VarNumbering numbering;
  numbering.number(term);
  Query q;
  q.goal = to_goal(term, {}, true);
  q.num_vars = numbering.count();
  q.var_names = numbering.names();
  resolve(q.goal, program);
  return q;
}

}  // namespace tracefold::microlog
