#include "tracefold/monitors.hpp"

#include <algorithm>
#include <sstream>

namespace tracefold {

void Graph::add(const PredKey& from, const PredKey& to) {
  auto [it, inserted] = arcs.try_emplace(Arc{from, to}, 1);
  if (!inserted && counted) ++it->second;
}

std::uint64_t Graph::weight(const PredKey& from, const PredKey& to) const {
  auto it = arcs.find(Arc{from, to});
  return it == arcs.end() ? 0 : it->second;
}

std::set<PredKey> Graph::nodes() const {
  std::set<PredKey> out;
  for (const auto& [arc, w] : arcs) {
    out.insert(arc.first);
    out.insert(arc.second);
  }
  return out;
}

std::string to_dot(const Graph& graph, const std::string& title) {
  std::vector<std::string> lines;
  lines.reserve(graph.arcs.size());
  for (const auto& [arc, w] : graph.arcs) {
    std::string line = "  \"" + arc.first.display() + "\" -> \"" + arc.second.display() + "\"";
    if (graph.counted) line += " [label=\"" + std::to_string(w) + "\"]";
    line += ";";
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "digraph " + title + " {\n";
  for (const auto& l : lines) out += l + "\n";
  out += "}\n";
  return out;
}

Monitor<std::uint64_t> count_calls() {
  return make_monitor<std::uint64_t>(
      "count_calls", [] { return std::uint64_t{0}; },
      [](const Event& e, std::uint64_t& n) {
        if (e.port == Port::call) ++n;
      });
}

Monitor<PortCounts> port_histogram() {
  return make_monitor<PortCounts>(
      "port_histogram",
      [] {
        PortCounts h;
        for (Port p : kAllPorts) h[p] = 0;
        return h;
      },
      [](const Event& e, PortCounts& h) { ++h[e.port]; });
}

Monitor<std::map<std::uint32_t, std::uint64_t>> depth_histogram() {
  using Hist = std::map<std::uint32_t, std::uint64_t>;
  return make_monitor<Hist>(
      "depth_histogram", [] { return Hist{}; },
      [](const Event& e, Hist& h) {
        if (e.port == Port::call) ++h[e.depth];
      });
}

Monitor<SolutionSet> collect_solutions() {
  return make_monitor<SolutionSet>(
      "solutions", [] { return SolutionSet{}; },
      [](const Event& e, SolutionSet& s) {
        if (e.port == Port::exit) s.emplace(e.proc.name, e.live_args());
      });
}

Monitor<DepthInterval> max_depth_interval(std::uint64_t n) {
  auto m = make_monitor<DepthInterval>(
      "max_depth_interval", [] { return DepthInterval{}; },
      [](const Event& e, DepthInterval& acc) {
        ++acc.events;
        acc.max_depth = std::max(acc.max_depth, e.depth);
      });
  m.admits = [n](const Event&, const DepthInterval& acc) { return acc.events < n; };
  return m;
}

namespace {

bool tracked_by_cfg(Port p) {
  return p == Port::call || p == Port::exit || p == Port::fail || p == Port::redo;
}

}  // namespace

Monitor<CfgState, Graph> control_flow_graph(bool counted) {
  Monitor<CfgState, Graph> m;
  m.name = counted ? "cfg_counted" : "cfg";
  m.initialize = [counted] {
    CfgState s;
    s.graph.counted = counted;
    return s;
  };
  m.update = [](const Event& e, CfgState& s) {
    if (!tracked_by_cfg(e.port)) return;
    PredKey current = PredKey::of(e);
    s.graph.add(s.previous, current);
    s.previous = std::move(current);
  };
  m.post_process = [](CfgState s) { return std::move(s.graph); };
  return m;
}

void update_call_stack(const Event& e, std::vector<PredKey>& stack) {
  switch (e.port) {
    case Port::call:
    case Port::redo: stack.push_back(PredKey::of(e)); break;
    case Port::exit:
    case Port::fail:
    case Port::exception:
      if (stack.empty())
        throw MonitorIntegrityError("call stack underflow at event " + std::to_string(e.chrono) +
                                    " (" + std::string(to_string(e.port)) + " of " +
                                    e.proc.display() + ")");
      stack.pop_back();
      break;
    default: break;
  }
}

Monitor<CallGraphState, Graph> dynamic_call_graph() {
  Monitor<CallGraphState, Graph> m;
  m.name = "call_graph";
  m.initialize = [] { return CallGraphState{}; };
  m.update = [](const Event& e, CallGraphState& s) {
    if (e.port == Port::call) {
      if (s.stack.empty())
        throw MonitorIntegrityError("call at event " + std::to_string(e.chrono) +
                                    " with an empty call stack");
      s.graph.add(s.stack.back(), PredKey::of(e));
    }
    update_call_stack(e, s.stack);
  };
  m.post_process = [](CallGraphState s) { return std::move(s.graph); };
  return m;
}

Monitor<std::uint8_t> empty_monitor() {
  return make_monitor<std::uint8_t>(
      "empty", [] { return std::uint8_t{0}; }, [](const Event&, std::uint8_t&) {});
}

}  // namespace tracefold
