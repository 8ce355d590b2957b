#pragma once

// Helpers shared by the test binaries: event builders, a seeded generator
// of well-formed Byrd traces, and independent trace oracles.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tracefold/event.hpp"

namespace testsupport {

using namespace tracefold;

inline std::filesystem::path programs_dir() { return TRACEFOLD_PROGRAMS_DIR; }
inline std::filesystem::path program(const std::string& name) { return programs_dir() / name; }
inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(TRACEFOLD_GOLDEN_DIR) / name;
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tracefold-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline ProcId proc(const std::string& name, std::uint32_t arity,
                   const std::string& module = "m") {
  return ProcId{ProcKind::predicate, module, module, name, arity, 0};
}

inline Event event(std::uint64_t chrono, std::uint64_t call, std::uint32_t depth, Port port,
                   const std::string& name, std::uint32_t arity = 0,
                   Determinism det = Determinism::nondet) {
  Event e;
  e.chrono = chrono;
  e.call = call;
  e.depth = depth;
  e.port = port;
  e.det = det;
  e.proc = proc(name, arity);
  return e;
}

// Builds a trace from (call, port, name/arity) triples; chrono and depth are
// filled in, depth following the call/redo push and exit/fail pop rules.
struct Step {
  std::uint64_t call;
  Port port;
  std::string name;
  std::uint32_t arity = 0;
};

inline std::vector<Event> trace_of(const std::vector<Step>& steps) {
  std::vector<Event> out;
  std::map<std::uint64_t, std::uint32_t> depth_of;
  std::uint32_t depth = 0;
  std::uint64_t chrono = 0;
  for (const auto& s : steps) {
    std::uint32_t d = 0;
    switch (s.port) {
      case Port::call:
        d = ++depth;
        depth_of[s.call] = d;
        break;
      case Port::redo:
        d = depth_of.at(s.call);
        depth = d;
        break;
      case Port::exit:
      case Port::fail:
      case Port::exception:
        d = depth_of.at(s.call);
        depth = d - 1;
        break;
      default: d = depth_of.at(s.call); break;
    }
    out.push_back(event(++chrono, s.call, d, s.port, s.name, s.arity));
  }
  return out;
}

// Random well-formed Byrd trace of at most `max_events` events: nested
// calls, exits, fails, redos of the most recently exited child, and
// internal events, ending with every invocation closed.
inline std::vector<Event> random_byrd_trace(std::mt19937_64& rng, std::size_t max_events) {
  static const std::vector<std::pair<std::string, std::uint32_t>> pool = {
      {"p", 1}, {"q", 2}, {"r", 0}, {"s", 3}, {"t", 1}};
  struct Open {
    std::uint64_t call;
    std::size_t proc;
    std::uint32_t depth;
    std::vector<std::size_t> redoable;  // indexes into `closed`
  };
  struct Closed {
    std::uint64_t call;
    std::size_t proc;
    std::uint32_t depth;
  };

  std::vector<Event> out;
  std::vector<Open> stack;
  std::vector<Closed> closed;
  std::uint64_t next_call = 0;
  auto emit = [&](std::uint64_t call, std::size_t p, std::uint32_t depth, Port port) {
    Event e = event(out.size() + 1, call, depth, port, pool[p].first, pool[p].second);
    if (!is_external(port)) e.goal_path = {GoalPathStep::conj(1 + rng() % 3), GoalPathStep::then()};
    out.push_back(std::move(e));
  };
  auto open_call = [&] {
    std::size_t p = rng() % pool.size();
    std::uint32_t depth = static_cast<std::uint32_t>(stack.size()) + 1;
    stack.push_back(Open{++next_call, p, depth, {}});
    emit(next_call, p, depth, Port::call);
  };
  auto close_top = [&](bool allow_exit) {
    Open top = stack.back();
    stack.pop_back();
    bool exit = allow_exit && rng() % 3 != 0;
    emit(top.call, top.proc, top.depth, exit ? Port::exit : Port::fail);
    if (exit && !stack.empty()) {
      closed.push_back(Closed{top.call, top.proc, top.depth});
      stack.back().redoable.push_back(closed.size() - 1);
    }
  };

  std::size_t budget = max_events == 0 ? 0 : 1 + rng() % max_events;
  if (budget == 0) return out;
  open_call();
  // Reserve room to close every open frame.
  while (!stack.empty() && out.size() + stack.size() < budget) {
    unsigned choice = rng() % 10;
    Open& top = stack.back();
    if (choice < 4 && stack.size() < 12) {
      open_call();
    } else if (choice < 5) {
      emit(top.call, top.proc, top.depth, rng() % 2 ? Port::disj : Port::cond);
    } else if (choice < 6 && !top.redoable.empty()) {
      Closed c = closed[top.redoable.back()];
      top.redoable.pop_back();
      stack.push_back(Open{c.call, c.proc, c.depth, {}});
      emit(c.call, c.proc, c.depth, Port::redo);
    } else {
      close_top(true);
    }
  }
  while (!stack.empty()) close_top(true);
  return out;
}

// Per call number, the external ports must match
//   call (exit | fail | exception) (redo (exit | fail | exception))*
// with nothing after a fail or exception. Returns the first violation.
inline std::string byrd_violation(const std::vector<Event>& trace) {
  // 0 = not called, 1 = inside, 2 = exited (redo allowed), 3 = finished
  std::map<std::uint64_t, int> state;
  for (const auto& e : trace) {
    if (!is_external(e.port)) {
      if (state[e.call] != 1) return "internal event outside its box at " + std::to_string(e.chrono);
      continue;
    }
    int& s = state[e.call];
    switch (e.port) {
      case Port::call:
        if (s != 0) return "second call at " + std::to_string(e.chrono);
        s = 1;
        break;
      case Port::exit:
        if (s != 1) return "exit outside box at " + std::to_string(e.chrono);
        s = 2;
        break;
      case Port::fail:
      case Port::exception:
        if (s != 1) return "fail/exception outside box at " + std::to_string(e.chrono);
        s = 3;
        break;
      case Port::redo:
        if (s != 2) return "redo without prior exit at " + std::to_string(e.chrono);
        s = 1;
        break;
      default: break;
    }
  }
  return {};
}

}  // namespace testsupport
