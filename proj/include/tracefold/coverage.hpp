#pragma once

// Predicate and call-site coverage. Each key carries the list of exit/fail
// ports a test run must witness, derived from the declared determinism.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tracefold/foldt.hpp"
#include "tracefold/microlog.hpp"
#include "tracefold/monitors.hpp"

namespace tracefold {

struct PredCriterion {
  std::vector<std::uint64_t> seen_exit_calls;  // most recent first
  std::vector<Port> remaining;

  friend bool operator==(const PredCriterion&, const PredCriterion&) = default;
};

// Ports to witness for a procedure of determinism `d`. Committed-choice
// procedures produce at most one solution per call.
std::vector<Port> criterion_ports(Determinism d, bool committed_choice = false);

struct SiteKey {
  std::string module;
  std::string name;
  std::uint32_t line = 0;

  std::string display() const { return module + ":" + name + ":" + std::to_string(line); }

  friend bool operator==(const SiteKey&, const SiteKey&) = default;
  friend auto operator<=>(const SiteKey&, const SiteKey&) = default;
};

template <class Key>
struct CoverageState {
  // Fully covered keys are removed.
  std::map<Key, PredCriterion> criteria;
  std::size_t initial_ports = 0;
  std::size_t initial_keys = 0;
  // Keys whose criterion is an extension (failure / erroneous declarations).
  std::set<Key> extensions;
  std::set<Key> keys;

  // Later additions of a known key are ignored.
  void add(const Key& key, std::vector<Port> ports, bool extension = false) {
    if (keys.insert(key).second) {
      ++initial_keys;
      initial_ports += ports.size();
      if (extension) extensions.insert(key);
      if (!ports.empty()) criteria.emplace(key, PredCriterion{{}, std::move(ports)});
    }
  }

  std::size_t remaining_ports() const {
    std::size_t n = 0;
    for (const auto& [k, c] : criteria) n += c.remaining.size();
    return n;
  }
  // 1 - remaining/initial ports; 1 when there is nothing to cover.
  double rate() const {
    if (initial_ports == 0) return 1.0;
    return 1.0 - static_cast<double>(remaining_ports()) / static_cast<double>(initial_ports);
  }
  // Fraction of keys fully covered.
  double key_rate() const {
    if (initial_keys == 0) return 1.0;
    return static_cast<double>(initial_keys - criteria.size()) / static_cast<double>(initial_keys);
  }

  friend bool operator==(const CoverageState&, const CoverageState&) = default;
};

using PredCoverage = CoverageState<PredKey>;
using SiteCoverage = CoverageState<SiteKey>;

// Applies one exit or fail event for `key`; other ports are ignored.
template <class Key>
void apply_coverage_event(CoverageState<Key>& state, const Key& key, Port port,
                          std::uint64_t call) {
  if (port != Port::exit && port != Port::fail) return;
  auto it = state.criteria.find(key);
  if (it == state.criteria.end()) return;
  PredCriterion& pc = it->second;

  auto remove_port = [&pc](Port p) {
    auto pos = std::find(pc.remaining.begin(), pc.remaining.end(), p);
    if (pos != pc.remaining.end()) pc.remaining.erase(pos);
  };
  bool seen = std::find(pc.seen_exit_calls.begin(), pc.seen_exit_calls.end(), call) !=
              pc.seen_exit_calls.end();
  if (pc.seen_exit_calls.empty())
    remove_port(port);
  else if (seen) {
    if (port == Port::exit) remove_port(Port::exit);
  } else if (port == Port::fail) {
    remove_port(Port::fail);
  }

  if (pc.remaining.empty()) {
    state.criteria.erase(it);
    return;
  }
  if (port == Port::exit && !seen) pc.seen_exit_calls.insert(pc.seen_exit_calls.begin(), call);
}

// One criterion per user predicate of the program.
PredCoverage generate_pred_criteria(const microlog::Program& program);
// One criterion per call site of a user predicate.
SiteCoverage generate_call_site_criteria(const microlog::Program& program);

Monitor<PredCoverage> predicate_coverage(PredCoverage initial);
// Requires the line_number attribute on every event.
Monitor<SiteCoverage> call_site_coverage(SiteCoverage initial);

// One line `key: remaining [ports]` per uncovered key, then `rate: NN.N%`.
std::string coverage_report(const PredCoverage& state);
std::string coverage_report(const SiteCoverage& state);

}  // namespace tracefold
