#pragma once

// Built-in monitors: execution profiles, solution collection, interval
// depth, control flow and call graphs with DOT export.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tracefold/foldt.hpp"

namespace tracefold {

struct PredKey {
  std::string name;
  std::uint32_t arity = 0;

  static PredKey of(const Event& e) { return PredKey{e.proc.name, e.proc.arity}; }
  static PredKey user() { return PredKey{"user", 0}; }
  std::string display() const { return name + "/" + std::to_string(arity); }

  friend bool operator==(const PredKey&, const PredKey&) = default;
  friend auto operator<=>(const PredKey&, const PredKey&) = default;
};

struct Graph {
  using Arc = std::pair<PredKey, PredKey>;

  bool counted = false;
  std::map<Arc, std::uint64_t> arcs;  // weight is 1 unless counted

  void add(const PredKey& from, const PredKey& to);
  bool has_arc(const PredKey& from, const PredKey& to) const {
    return arcs.count(Arc{from, to}) != 0;
  }
  std::uint64_t weight(const PredKey& from, const PredKey& to) const;
  std::set<PredKey> nodes() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

// Edges sorted by their rendered endpoints; counted graphs carry labels.
std::string to_dot(const Graph& graph, const std::string& title);

Monitor<std::uint64_t> count_calls();

using PortCounts = std::map<Port, std::uint64_t>;
// Every port is present in the result, zero when unseen.
Monitor<PortCounts> port_histogram();

// Number of call events per depth.
Monitor<std::map<std::uint32_t, std::uint64_t>> depth_histogram();

using SolutionSet = std::set<std::pair<std::string, std::vector<Term>>>;
// (procedure name, live arguments) at every exit. Requires `args`.
Monitor<SolutionSet> collect_solutions();

struct DepthInterval {
  std::uint64_t events = 0;
  std::uint32_t max_depth = 0;

  friend bool operator==(const DepthInterval&, const DepthInterval&) = default;
};
// Accepts `n` events, rejects the next one.
Monitor<DepthInterval> max_depth_interval(std::uint64_t n = 500);

struct CfgState {
  PredKey previous = PredKey::user();
  Graph graph;

  friend bool operator==(const CfgState&, const CfgState&) = default;
};
Monitor<CfgState, Graph> control_flow_graph(bool counted = false);

struct CallGraphState {
  std::vector<PredKey> stack{PredKey::user()};
  Graph graph;

  friend bool operator==(const CallGraphState&, const CallGraphState&) = default;
};
// Throws MonitorIntegrityError when the trace pops more than it pushed.
Monitor<CallGraphState, Graph> dynamic_call_graph();

// Applies the call-stack update of the call graph monitor to `stack`.
void update_call_stack(const Event& e, std::vector<PredKey>& stack);

// Accepts every event and does nothing; measures the bare fold cost.
Monitor<std::uint8_t> empty_monitor();

}  // namespace tracefold
