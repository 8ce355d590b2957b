#include <algorithm>
#include <iostream>
#include <set>
#include <unordered_map>

#include "tracefold/microlog.hpp"

namespace tracefold::microlog {

namespace {

using CellRef = std::uint32_t;

struct Cell {
  enum class Tag : std::uint8_t { ref, integer, atom, structure };
  Tag tag = Tag::ref;
  std::uint32_t a = 0;      // ref target, atom id, or functor atom id
  std::uint32_t arity = 0;  // structure arity
  std::int64_t value = 0;   // integer
};

class AtomTable {
 public:
  AtomTable() {
    nil = intern("[]");
    cons = intern("[|]");
  }

  std::uint32_t intern(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }
  const std::string& name(std::uint32_t id) const { return names_[id]; }

  std::uint32_t nil = 0;
  std::uint32_t cons = 0;

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
};

struct EvalError {
  std::string message;
};

// Cell heap with a binding trail. Compound terms occupy a header cell
// followed by one cell per argument.
class Store {
 public:
  CellRef new_var() {
    auto r = size();
    cells_.push_back(Cell{Cell::Tag::ref, r, 0, 0});
    return r;
  }
  CellRef new_vars(std::uint32_t n) {
    auto base = size();
    for (std::uint32_t i = 0; i < n; ++i) new_var();
    return base;
  }
  CellRef new_int(std::int64_t v) {
    cells_.push_back(Cell{Cell::Tag::integer, 0, 0, v});
    return size() - 1;
  }
  CellRef new_atom(std::uint32_t id) {
    cells_.push_back(Cell{Cell::Tag::atom, id, 0, 0});
    return size() - 1;
  }
  CellRef new_struct(std::uint32_t functor, const std::vector<CellRef>& args) {
    auto h = size();
    cells_.push_back(Cell{Cell::Tag::structure, functor, static_cast<std::uint32_t>(args.size()), 0});
    for (CellRef a : args) {
      const Cell& c = cells_[a];
      if (c.tag == Cell::Tag::integer || c.tag == Cell::Tag::atom)
        cells_.push_back(c);
      else
        cells_.push_back(Cell{Cell::Tag::ref, a, 0, 0});
    }
    return h;
  }

  CellRef deref(CellRef r) const {
    while (cells_[r].tag == Cell::Tag::ref && cells_[r].a != r) r = cells_[r].a;
    return r;
  }
  const Cell& at(CellRef r) const { return cells_[r]; }
  bool is_unbound(CellRef r) const {
    return cells_[r].tag == Cell::Tag::ref && cells_[r].a == r;
  }

  void bind(CellRef var, CellRef value) {
    cells_[var].a = value;
    trail_.push_back(var);
  }

  bool unify(CellRef x, CellRef y) {
    std::vector<std::pair<CellRef, CellRef>> work{{x, y}};
    while (!work.empty()) {
      auto [p, q] = work.back();
      work.pop_back();
      p = deref(p);
      q = deref(q);
      if (p == q) continue;
      if (is_unbound(p)) {
        bind(p, q);
        continue;
      }
      if (is_unbound(q)) {
        bind(q, p);
        continue;
      }
      const Cell& a = cells_[p];
      const Cell& b = cells_[q];
      if (a.tag != b.tag) return false;
      switch (a.tag) {
        case Cell::Tag::integer:
          if (a.value != b.value) return false;
          break;
        case Cell::Tag::atom:
          if (a.a != b.a) return false;
          break;
        case Cell::Tag::structure:
          if (a.a != b.a || a.arity != b.arity) return false;
          for (std::uint32_t i = 0; i < a.arity; ++i) work.emplace_back(p + 1 + i, q + 1 + i);
          break;
        case Cell::Tag::ref: return false;
      }
    }
    return true;
  }

  std::size_t heap_top() const { return cells_.size(); }
  std::size_t trail_top() const { return trail_.size(); }

  void restore(std::size_t heap, std::size_t trail) {
    while (trail_.size() > trail) {
      CellRef v = trail_.back();
      trail_.pop_back();
      cells_[v].a = v;
    }
    cells_.resize(heap);
  }

 private:
  CellRef size() const { return static_cast<CellRef>(cells_.size()); }

  std::vector<Cell> cells_;
  std::vector<CellRef> trail_;
};

struct Frame {
  std::uint64_t call_no = 0;
  std::uint32_t depth = 0;
  const ProcId* proc = nullptr;
  Determinism det = Determinism::det;
  std::vector<CellRef> args;
  std::optional<std::uint32_t> line;
  std::shared_ptr<Frame> parent;
  std::uint32_t exits = 0;
};
using FramePtr = std::shared_ptr<Frame>;

std::uint32_t depth_of(const FramePtr& f) { return f ? f->depth : 0; }

struct Cont {
  enum class Kind : std::uint8_t { goal, exit, commit };
  Kind kind = Kind::goal;
  const Goal* goal = nullptr;
  CellRef env = 0;
  const Clause* clause = nullptr;
  FramePtr frame;  // owner of `goal`, or the frame exiting
  std::size_t cp_height = 0;
  std::shared_ptr<const Cont> next;
};
using ContPtr = std::shared_ptr<const Cont>;

struct ChoicePoint {
  enum class Kind : std::uint8_t { clauses, disj, ite_else };
  Kind kind = Kind::clauses;
  std::size_t heap_top = 0;
  std::size_t trail_top = 0;
  FramePtr chain;
  ContPtr cont;
  // clauses
  const Predicate* pred = nullptr;
  std::shared_ptr<const std::vector<std::uint32_t>> candidates;
  std::size_t next = 0;
  // disj / ite_else
  const Goal* goal = nullptr;
  CellRef env = 0;
  const Clause* clause = nullptr;
};

const std::vector<ProcId>& builtin_procs() {
  static const std::vector<ProcId> procs = [] {
    std::vector<ProcId> out;
    for (const auto& b : builtin_table())
      out.push_back(ProcId{ProcKind::predicate, kBuiltinModule, kBuiltinModule, b.name, b.arity, 0});
    return out;
  }();
  return procs;
}

class Machine {
 public:
  Machine(const Program& program, const Query& query, TraceSink* sink, const SolveOptions& opts)
      : program_(program),
        query_(query),
        sink_(sink),
        filter_(opts.filter),
        mask_(opts.mask),
        max_solutions_(opts.max_solutions),
        out_(opts.output ? *opts.output : std::cout) {}

  SolveResult run() {
    query_env_ = store_.new_vars(query_.num_vars);
    cont_ = goal_node(&query_.goal, query_env_, nullptr, nullptr, nullptr);
    bool more = true;
    while (more) {
      if (!cont_) {
        record_solution();
        if (max_solutions_ != 0 && result_.solutions.size() >= max_solutions_) break;
        more = backtrack();
        continue;
      }
      ContPtr node = cont_;
      cont_ = node->next;
      more = step(*node);
    }
    finalize();
    return std::move(result_);
  }

 private:
  // --- continuations ------------------------------------------------------

  static ContPtr goal_node(const Goal* g, CellRef env, const Clause* clause, FramePtr owner,
                          ContPtr next) {
    auto c = std::make_shared<Cont>();
    c->kind = Cont::Kind::goal;
    c->goal = g;
    c->env = env;
    c->clause = clause;
    c->frame = std::move(owner);
    c->next = std::move(next);
    return c;
  }

  static ContPtr exit_node(FramePtr frame, CellRef env, const Clause* clause, ContPtr next) {
    auto c = std::make_shared<Cont>();
    c->kind = Cont::Kind::exit;
    c->env = env;
    c->clause = clause;
    c->frame = std::move(frame);
    c->next = std::move(next);
    return c;
  }

  static ContPtr commit_node(const Goal* ite, CellRef env, const Clause* clause, FramePtr owner,
                            std::size_t height, ContPtr next) {
    auto c = std::make_shared<Cont>();
    c->kind = Cont::Kind::commit;
    c->goal = ite;
    c->env = env;
    c->clause = clause;
    c->frame = std::move(owner);
    c->cp_height = height;
    c->next = std::move(next);
    return c;
  }

  ChoicePoint make_cp(ChoicePoint::Kind kind, ContPtr cont) const {
    ChoicePoint cp;
    cp.kind = kind;
    cp.heap_top = store_.heap_top();
    cp.trail_top = store_.trail_top();
    cp.chain = chain_;
    cp.cont = std::move(cont);
    return cp;
  }

  // --- execution ----------------------------------------------------------

  bool step(const Cont& node) {
    switch (node.kind) {
      case Cont::Kind::exit:
        emit(Port::exit, node.frame, nullptr, node.env, node.clause);
        chain_ = node.frame->parent;
        return true;
      case Cont::Kind::commit: {
        cps_.resize(node.cp_height);
        const Goal& then = node.goal->children[1];
        emit(Port::then, node.frame, &then.path, node.env, node.clause);
        cont_ = goal_node(&then, node.env, node.clause, node.frame, cont_);
        return true;
      }
      case Cont::Kind::goal: break;
    }

    const Goal& g = *node.goal;
    switch (g.kind) {
      case Goal::Kind::conj:
        for (auto it = g.children.rbegin(); it != g.children.rend(); ++it)
          cont_ = goal_node(&*it, node.env, node.clause, node.frame, cont_);
        return true;
      case Goal::Kind::disj: {
        if (g.children.size() > 1) {
          ChoicePoint cp = make_cp(ChoicePoint::Kind::disj, cont_);
          cp.goal = &g;
          cp.env = node.env;
          cp.clause = node.clause;
          cp.next = 1;
          cps_.push_back(std::move(cp));
        }
        const Goal& first = g.children.front();
        emit(Port::disj, node.frame, &first.path, node.env, node.clause);
        cont_ = goal_node(&first, node.env, node.clause, node.frame, cont_);
        return true;
      }
      case Goal::Kind::if_then_else: {
        std::size_t height = cps_.size();
        ChoicePoint cp = make_cp(ChoicePoint::Kind::ite_else, cont_);
        cp.goal = &g;
        cp.env = node.env;
        cp.clause = node.clause;
        cps_.push_back(std::move(cp));
        const Goal& cond = g.children[0];
        emit(Port::cond, node.frame, &cond.path, node.env, node.clause);
        cont_ = commit_node(&g, node.env, node.clause, node.frame, height, cont_);
        cont_ = goal_node(&cond, node.env, node.clause, node.frame, cont_);
        return true;
      }
      case Goal::Kind::call: return call_user(g, node.env);
      case Goal::Kind::builtin: return call_builtin(g, node.env);
    }
    return true;
  }

  FramePtr open_frame(const Goal& g, CellRef env, const ProcId* proc, Determinism det) {
    auto f = std::make_shared<Frame>();
    f->call_no = ++result_.calls;
    f->depth = depth_of(chain_) + 1;
    f->proc = proc;
    f->det = det;
    f->args.reserve(g.args.size());
    for (const auto& a : g.args) f->args.push_back(build(a, env));
    f->line = g.line;
    f->parent = chain_;
    chain_ = f;
    emit(Port::call, f, nullptr, 0, nullptr);
    return f;
  }

  bool call_user(const Goal& g, CellRef env) {
    const Predicate& pred = program_.predicates[g.target];
    FramePtr frame = open_frame(g, env, &pred.proc, pred.det);
    auto candidates = std::make_shared<std::vector<std::uint32_t>>();
    for (std::uint32_t i = 0; i < pred.clauses.size(); ++i)
      if (may_match(pred.clauses[i], *frame)) candidates->push_back(i);
    if (candidates->empty()) return backtrack();
    return try_clause(frame, pred, std::move(candidates), 0, cont_);
  }

  bool try_clause(const FramePtr& frame, const Predicate& pred,
                  std::shared_ptr<const std::vector<std::uint32_t>> candidates, std::size_t idx,
                  ContPtr after) {
    if (idx + 1 < candidates->size()) {
      ChoicePoint cp = make_cp(ChoicePoint::Kind::clauses, after);
      cp.pred = &pred;
      cp.candidates = candidates;
      cp.next = idx + 1;
      cps_.push_back(std::move(cp));
    }
    const Clause& clause = pred.clauses[(*candidates)[idx]];
    CellRef env = store_.new_vars(clause.num_vars);
    for (std::size_t k = 0; k < frame->args.size(); ++k) {
      if (!store_.unify(build(clause.head.args[k], env), frame->args[k])) return backtrack();
    }
    ContPtr next = exit_node(frame, env, &clause, std::move(after));
    if (clause.body) next = goal_node(&*clause.body, env, &clause, frame, std::move(next));
    cont_ = std::move(next);
    return true;
  }

  // First-pass clause selection: a clause is skipped when some head argument
  // clashes on its principal functor with the bound call argument.
  bool may_match(const Clause& clause, const Frame& frame) {
    for (std::size_t k = 0; k < frame.args.size(); ++k) {
      const TermAst& h = clause.head.args[k];
      if (h.kind == TermAst::Kind::var) continue;
      CellRef r = store_.deref(frame.args[k]);
      if (store_.is_unbound(r)) continue;
      const Cell& c = store_.at(r);
      switch (h.kind) {
        case TermAst::Kind::integer:
          if (c.tag != Cell::Tag::integer || c.value != h.value) return false;
          break;
        case TermAst::Kind::atom:
          if (c.tag != Cell::Tag::atom || atoms_.name(c.a) != h.name) return false;
          break;
        case TermAst::Kind::compound:
          if (c.tag != Cell::Tag::structure || c.arity != h.args.size() ||
              atoms_.name(c.a) != h.name)
            return false;
          break;
        case TermAst::Kind::var: break;
      }
    }
    return true;
  }

  bool call_builtin(const Goal& g, CellRef env) {
    const auto& info = builtin_table()[g.target];
    FramePtr frame = open_frame(g, env, &builtin_procs()[g.target], info.det);
    bool ok = false;
    try {
      ok = exec_builtin(info.name, frame->args);
    } catch (const EvalError& e) {
      for (FramePtr f = chain_; f; f = f->parent) emit(Port::exception, f, nullptr, 0, nullptr);
      chain_ = nullptr;
      finalize();
      std::string where = g.line ? " at line " + std::to_string(*g.line) : std::string();
      throw RuntimeError(info.name + "/" + std::to_string(info.arity) + where + ": " + e.message,
                         std::move(result_));
    }
    if (!ok) return backtrack();
    emit(Port::exit, frame, nullptr, 0, nullptr);
    chain_ = frame->parent;
    return true;
  }

  // Returns false when no choice point is left; frames still open fail.
  bool backtrack() {
    if (cps_.empty()) {
      transition(nullptr);
      return false;
    }
    ChoicePoint& top = cps_.back();
    store_.restore(top.heap_top, top.trail_top);
    transition(top.chain);

    switch (top.kind) {
      case ChoicePoint::Kind::clauses: {
        ChoicePoint cp = std::move(top);
        cps_.pop_back();
        return try_clause(chain_, *cp.pred, cp.candidates, cp.next, cp.cont);
      }
      case ChoicePoint::Kind::disj: {
        const Goal& branch = top.goal->children[top.next];
        CellRef env = top.env;
        const Clause* clause = top.clause;
        ContPtr cont = top.cont;
        if (top.next + 1 < top.goal->children.size())
          ++top.next;
        else
          cps_.pop_back();
        emit(Port::disj, chain_, &branch.path, env, clause);
        cont_ = goal_node(&branch, env, clause, chain_, std::move(cont));
        return true;
      }
      case ChoicePoint::Kind::ite_else: {
        ChoicePoint cp = std::move(top);
        cps_.pop_back();
        if (!cp.goal->has_else) return backtrack();
        const Goal& els = cp.goal->children[2];
        emit(Port::else_, chain_, &els.path, cp.env, cp.clause);
        cont_ = goal_node(&els, cp.env, cp.clause, chain_, std::move(cp.cont));
        return true;
      }
    }
    return false;
  }

  // Moves the open-invocation chain to `target`: invocations only on the
  // current chain fail (innermost first), invocations only on the target
  // chain had exited and are re-entered (outermost first).
  void transition(const FramePtr& target) {
    std::vector<FramePtr> fails;
    std::vector<FramePtr> redos;
    FramePtr a = chain_;
    FramePtr b = target;
    while (depth_of(a) > depth_of(b)) {
      fails.push_back(a);
      a = a->parent;
    }
    while (depth_of(b) > depth_of(a)) {
      redos.push_back(b);
      b = b->parent;
    }
    while (a != b) {
      fails.push_back(a);
      redos.push_back(b);
      a = a->parent;
      b = b->parent;
    }
    for (const auto& f : fails) emit(Port::fail, f, nullptr, 0, nullptr);
    for (auto it = redos.rbegin(); it != redos.rend(); ++it)
      emit(Port::redo, *it, nullptr, 0, nullptr);
    chain_ = target;
  }

  // --- terms --------------------------------------------------------------

  CellRef build(const TermAst& t, CellRef env) {
    switch (t.kind) {
      case TermAst::Kind::var: return env + t.var;
      case TermAst::Kind::integer: return store_.new_int(t.value);
      case TermAst::Kind::atom: return store_.new_atom(atoms_.intern(t.name));
      case TermAst::Kind::compound: {
        std::vector<CellRef> args;
        args.reserve(t.args.size());
        for (const auto& a : t.args) args.push_back(build(a, env));
        return store_.new_struct(atoms_.intern(t.name), args);
      }
    }
    return store_.new_var();
  }

  bool is_cons(const Cell& c) const {
    return c.tag == Cell::Tag::structure && c.a == atoms_.cons && c.arity == 2;
  }

  Term snapshot(CellRef r) const {
    r = store_.deref(r);
    const Cell& c = store_.at(r);
    switch (c.tag) {
      case Cell::Tag::ref: return Term::unbound();
      case Cell::Tag::integer: return Term::integer(c.value);
      case Cell::Tag::atom:
        if (c.a == atoms_.nil) return Term::list({});
        return Term::atom(atoms_.name(c.a));
      case Cell::Tag::structure: {
        if (is_cons(c)) {
          std::vector<Term> elems;
          CellRef cur = r;
          while (is_cons(store_.at(cur))) {
            elems.push_back(snapshot(cur + 1));
            cur = store_.deref(cur + 2);
          }
          const Cell& tail = store_.at(cur);
          if (tail.tag == Cell::Tag::atom && tail.a == atoms_.nil) return Term::list(std::move(elems));
          Term t = snapshot(cur);
          for (auto it = elems.rbegin(); it != elems.rend(); ++it)
            t = Term::compound("[|]", {std::move(*it), std::move(t)});
          return t;
        }
        std::vector<Term> args;
        for (std::uint32_t i = 0; i < c.arity; ++i) args.push_back(snapshot(r + 1 + i));
        return Term::compound(atoms_.name(c.a), std::move(args));
      }
    }
    return Term::unbound();
  }

  std::string type_name(CellRef r) const {
    r = store_.deref(r);
    const Cell& c = store_.at(r);
    switch (c.tag) {
      case Cell::Tag::ref: return "-";
      case Cell::Tag::integer: return "int";
      case Cell::Tag::atom: return c.a == atoms_.nil ? "list(_)" : "atom";
      case Cell::Tag::structure:
        if (is_cons(c)) {
          std::string elem = type_name(r + 1);
          return "list(" + (elem == "-" ? std::string("_") : elem) + ")";
        }
        return atoms_.name(c.a) + "/" + std::to_string(c.arity);
    }
    return "-";
  }

  void write_term(std::string& out, CellRef r) const {
    r = store_.deref(r);
    const Cell& c = store_.at(r);
    switch (c.tag) {
      case Cell::Tag::ref: out += "_G" + std::to_string(r); return;
      case Cell::Tag::integer: out += std::to_string(c.value); return;
      case Cell::Tag::atom: out += atoms_.name(c.a); return;
      case Cell::Tag::structure:
        if (is_cons(c)) {
          out += '[';
          CellRef cur = r;
          bool first = true;
          while (is_cons(store_.at(cur))) {
            if (!first) out += ", ";
            first = false;
            write_term(out, cur + 1);
            cur = store_.deref(cur + 2);
          }
          const Cell& tail = store_.at(cur);
          if (!(tail.tag == Cell::Tag::atom && tail.a == atoms_.nil)) {
            out += '|';
            write_term(out, cur);
          }
          out += ']';
          return;
        }
        out += atoms_.name(c.a);
        out += '(';
        for (std::uint32_t i = 0; i < c.arity; ++i) {
          if (i) out += ", ";
          write_term(out, r + 1 + i);
        }
        out += ')';
        return;
    }
  }

  std::int64_t eval(CellRef r) const {
    r = store_.deref(r);
    const Cell& c = store_.at(r);
    switch (c.tag) {
      case Cell::Tag::ref: throw EvalError{"instantiation error: arithmetic on an unbound variable"};
      case Cell::Tag::integer: return c.value;
      case Cell::Tag::atom: throw EvalError{"type error: '" + atoms_.name(c.a) + "' is not a number"};
      case Cell::Tag::structure: break;
    }
    const std::string& op = atoms_.name(c.a);
    if (c.arity == 1 && op == "-") {
      std::int64_t v = eval(r + 1), out = 0;
      if (__builtin_sub_overflow(std::int64_t{0}, v, &out)) throw EvalError{"integer overflow"};
      return out;
    }
    if (c.arity == 2) {
      std::int64_t x = eval(r + 1), y = eval(r + 2), out = 0;
      if (op == "+") {
        if (__builtin_add_overflow(x, y, &out)) throw EvalError{"integer overflow"};
        return out;
      }
      if (op == "-") {
        if (__builtin_sub_overflow(x, y, &out)) throw EvalError{"integer overflow"};
        return out;
      }
      if (op == "*") {
        if (__builtin_mul_overflow(x, y, &out)) throw EvalError{"integer overflow"};
        return out;
      }
      if (op == "//" || op == "mod") {
        if (y == 0) throw EvalError{"evaluation error: division by zero"};
        if (x == INT64_MIN && y == -1) throw EvalError{"integer overflow"};
        if (op == "//") return x / y;
        std::int64_t m = x % y;
        return (m != 0 && ((m < 0) != (y < 0))) ? m + y : m;
      }
    }
    throw EvalError{"type error: unknown arithmetic function " + op + "/" + std::to_string(c.arity)};
  }

  bool exec_builtin(const std::string& name, const std::vector<CellRef>& args) {
    if (name == "true") return true;
    if (name == "fail") return false;
    if (name == "=") return store_.unify(args[0], args[1]);
    if (name == "\\=") {
      auto heap = store_.heap_top();
      auto trail = store_.trail_top();
      bool unifiable = store_.unify(args[0], args[1]);
      store_.restore(heap, trail);
      return !unifiable;
    }
    if (name == "is") {
      std::int64_t v = eval(args[1]);
      return store_.unify(args[0], store_.new_int(v));
    }
    if (name == "write") {
      std::string s;
      write_term(s, args[0]);
      out_ << s;
      return true;
    }
    if (name == "nl") {
      out_ << '\n';
      return true;
    }
    std::int64_t x = eval(args[0]);
    std::int64_t y = eval(args[1]);
    if (name == "<") return x < y;
    if (name == ">") return x > y;
    if (name == "=<") return x <= y;
    if (name == ">=") return x >= y;
    if (name == "=:=") return x == y;
    if (name == "=\\=") return x != y;
    throw EvalError{"unknown built-in " + name};
  }

  // --- events -------------------------------------------------------------

  void check_determinism(Port port, Frame& f) {
    if (port == Port::exit) {
      ++f.exits;
      if (f.det == Determinism::failure || f.det == Determinism::erroneous)
        warn(f, "declared " + std::string(to_string(f.det)) + " but exited");
      else if ((f.det == Determinism::det || f.det == Determinism::semidet) && f.exits > 1)
        warn(f, "declared " + std::string(to_string(f.det)) + " but produced more than one solution");
    } else if (port == Port::fail && (f.det == Determinism::det || f.det == Determinism::multi) &&
               f.exits == 0) {
      warn(f, "declared " + std::string(to_string(f.det)) + " but failed without a solution");
    }
  }

  void warn(const Frame& f, const std::string& what) {
    std::string msg = f.proc->display() + ": " + what;
    if (warned_.insert(msg).second) result_.determinism_warnings.push_back(msg);
  }

  void emit(Port port, const FramePtr& frame, const GoalPath* path, CellRef env,
            const Clause* clause) {
    // internal events of the top-level query have no procedure to report
    if (!frame) return;
    ++result_.events;
    if (is_external(port)) check_determinism(port, *frame);
    if (!sink_ || !filter_.admits(frame->proc->decl_module, port)) return;

    Event e;
    e.chrono = result_.events;
    e.call = frame->call_no;
    e.depth = frame->depth;
    e.port = port;
    e.det = frame->det;
    e.proc = *frame->proc;
    if (path) e.goal_path = *path;
    e.mask = mask_;
    if (mask_.has(OptionalAttribute::args)) {
      std::vector<Term> args;
      args.reserve(frame->args.size());
      for (CellRef a : frame->args) args.push_back(snapshot(a));
      e.args = std::move(args);
    }
    if (mask_.has(OptionalAttribute::arg_types)) {
      std::vector<std::string> types;
      types.reserve(frame->args.size());
      for (CellRef a : frame->args) types.push_back(type_name(a));
      e.arg_types = std::move(types);
    }
    if (mask_.has(OptionalAttribute::local_vars)) {
      std::vector<LiveVar> vars;
      if (clause) {
        for (std::uint32_t i = 0; i < clause->num_vars; ++i) {
          const std::string& name = clause->var_names[i];
          if (name.front() == '_' || clause->is_head_arg_var[i]) continue;
          CellRef r = store_.deref(env + i);
          if (store_.is_unbound(r)) continue;
          vars.push_back(LiveVar{name, snapshot(r), type_name(r)});
        }
      }
      e.local_vars = std::move(vars);
    }
    if (mask_.has(OptionalAttribute::line_number) && frame->line) e.line_number = frame->line;
    sink_->accept(e);
  }

  void record_solution() {
    Solution s;
    for (std::uint32_t i = 0; i < query_.num_vars; ++i) {
      const std::string& name = query_.var_names[i];
      if (name.front() == '_') continue;
      s.bindings.emplace_back(name, snapshot(query_env_ + i));
    }
    result_.solutions.push_back(std::move(s));
  }

  void finalize() { out_.flush(); }

  const Program& program_;
  const Query& query_;
  TraceSink* sink_;
  const EventFilter& filter_;
  AttributeMask mask_;
  std::size_t max_solutions_;
  std::ostream& out_;

  Store store_;
  AtomTable atoms_;
  CellRef query_env_ = 0;
  FramePtr chain_;
  ContPtr cont_;
  std::vector<ChoicePoint> cps_;
  SolveResult result_;
  std::set<std::string> warned_;
};

}  // namespace

SolveResult solve(const Program& program, const Query& query, TraceSink* sink,
                  const SolveOptions& options) {
  Machine m(program, query, sink, options);
  return m.run();
}

}  // namespace tracefold::microlog
