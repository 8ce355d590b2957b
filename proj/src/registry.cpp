#include "tracefold/registry.hpp"

#include <sstream>
#include <stdexcept>

#include "tracefold/coverage.hpp"
#include "tracefold/monitors.hpp"

namespace tracefold {

namespace {

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::uint64_t parse_interval(const std::string& text) {
  if (text.empty()) return 500;
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || n == 0 || text.front() == '-')
    throw std::invalid_argument("max_depth_interval: interval must be a positive integer, got '" +
                                text + "'");
  return n;
}

const microlog::Program& need_program(const std::string& name, const microlog::Program* p) {
  if (!p) throw std::invalid_argument("monitor '" + name + "' needs a program");
  return *p;
}

}  // namespace

const std::vector<std::string>& registered_monitors() {
  static const std::vector<std::string> names = {
      "count_calls", "port_histogram", "depth_histogram", "solutions",     "max_depth_interval",
      "cfg",         "cfg_counted",    "call_graph",      "pred_coverage", "site_coverage"};
  return names;
}

ReportMonitor make_report_monitor(const std::string& spec, const microlog::Program* program) {
  auto [name, param] = split_spec(spec);
  if (!param.empty() && name != "max_depth_interval")
    throw std::invalid_argument("monitor '" + name + "' takes no parameter");

  if (name == "count_calls")
    return make_report<std::uint64_t, std::uint64_t>(
        count_calls(), [](const std::uint64_t& n) { return "calls: " + std::to_string(n) + "\n"; });
  if (name == "port_histogram")
    return make_report<PortCounts, PortCounts>(port_histogram(), [](const PortCounts& h) {
      std::string out;
      for (const auto& [port, n] : h)
        out += std::string(to_string(port)) + ": " + std::to_string(n) + "\n";
      return out;
    });
  if (name == "depth_histogram") {
    using Hist = std::map<std::uint32_t, std::uint64_t>;
    return make_report<Hist, Hist>(depth_histogram(), [](const Hist& h) {
      std::string out;
      for (const auto& [d, n] : h)
        out += "depth " + std::to_string(d) + ": " + std::to_string(n) + "\n";
      return out;
    });
  }
  if (name == "solutions")
    return make_report<SolutionSet, SolutionSet>(collect_solutions(), [](const SolutionSet& s) {
      std::string out;
      for (const auto& [proc, args] : s) out += proc + ": " + to_string(Term::list(args)) + "\n";
      return out;
    });
  if (name == "max_depth_interval") {
    auto m = make_report<DepthInterval, DepthInterval>(
        max_depth_interval(parse_interval(param)), [](const DepthInterval& d) {
          return "events: " + std::to_string(d.events) +
                 ", max depth: " + std::to_string(d.max_depth) + "\n";
        });
    m.name = spec;
    return m;
  }
  if (name == "cfg" || name == "cfg_counted")
    return make_report<CfgState, Graph>(control_flow_graph(name == "cfg_counted"),
                                  [name = name](const Graph& g) { return to_dot(g, name); });
  if (name == "call_graph")
    return make_report<CallGraphState, Graph>(dynamic_call_graph(),
                                        [](const Graph& g) { return to_dot(g, "call_graph"); });
  if (name == "pred_coverage")
    return make_report<PredCoverage, PredCoverage>(
        predicate_coverage(generate_pred_criteria(need_program(name, program))),
        [](const PredCoverage& s) { return coverage_report(s); });
  if (name == "site_coverage")
    return make_report<SiteCoverage, SiteCoverage>(
        call_site_coverage(generate_call_site_criteria(need_program(name, program))),
        [](const SiteCoverage& s) { return coverage_report(s); });

  std::string known;
  for (const auto& n : registered_monitors()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown monitor '" + name + "' (known: " + known + ")");
}

AttributeMask required_attributes(const std::string& spec) {
  auto name = split_spec(spec).first;
  if (name == "solutions") return AttributeMask::none().with(OptionalAttribute::args);
  if (name == "site_coverage") return AttributeMask::none().with(OptionalAttribute::line_number);
  return AttributeMask::none();
}

}  // namespace tracefold
