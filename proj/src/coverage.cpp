#include "tracefold/coverage.hpp"

#include <cmath>
#include <sstream>

namespace tracefold {

std::vector<Port> criterion_ports(Determinism d, bool committed_choice) {
  switch (d) {
    case Determinism::det: return {Port::exit};
    case Determinism::semidet: return {Port::exit, Port::fail};
    case Determinism::multi:
      if (committed_choice) return {Port::exit};
      return {Port::exit, Port::exit};
    case Determinism::nondet:
      if (committed_choice) return {Port::exit, Port::fail};
      return {Port::exit, Port::exit, Port::fail};
    case Determinism::failure: return {Port::fail};
    case Determinism::erroneous: return {};
  }
  return {};
}

namespace {

bool is_extension(Determinism d) {
  return d == Determinism::failure || d == Determinism::erroneous;
}

template <class Key>
std::string render(const CoverageState<Key>& state) {
  std::ostringstream out;
  for (const auto& [key, pc] : state.criteria) {
    out << key.display() << ": remaining [";
    for (std::size_t i = 0; i < pc.remaining.size(); ++i)
      out << (i ? ", " : "") << to_string(pc.remaining[i]);
    out << "]";
    if (state.extensions.count(key)) out << " (extension criterion)";
    out << "\n";
  }
  double pct = std::round(state.rate() * 1000.0) / 10.0;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << "rate: " << pct << "%\n";
  return out.str();
}

}  // namespace

PredCoverage generate_pred_criteria(const microlog::Program& program) {
  PredCoverage state;
  for (const auto& p : program.predicates)
    state.add(PredKey{p.name, p.arity}, criterion_ports(p.det, p.committed_choice),
              is_extension(p.det));
  return state;
}

SiteCoverage generate_call_site_criteria(const microlog::Program& program) {
  SiteCoverage state;
  for (const auto& site : program.call_sites()) {
    const auto* p = program.find(site.callee, site.arity);
    if (!p) continue;
    state.add(SiteKey{program.module, site.callee, site.line},
              criterion_ports(p->det, p->committed_choice), is_extension(p->det));
  }
  return state;
}

Monitor<PredCoverage> predicate_coverage(PredCoverage initial) {
  return make_monitor<PredCoverage>(
      "pred_coverage", [initial = std::move(initial)] { return initial; },
      [](const Event& e, PredCoverage& s) {
        apply_coverage_event(s, PredKey::of(e), e.port, e.call);
      });
}

Monitor<SiteCoverage> call_site_coverage(SiteCoverage initial) {
  return make_monitor<SiteCoverage>(
      "site_coverage", [initial = std::move(initial)] { return initial; },
      [](const Event& e, SiteCoverage& s) {
        auto line = e.call_site_line();
        if (!line) return;
        apply_coverage_event(s, SiteKey{e.proc.decl_module, e.proc.name, *line}, e.port, e.call);
      });
}

std::string coverage_report(const PredCoverage& state) { return render(state); }
std::string coverage_report(const SiteCoverage& state) { return render(state); }

}  // namespace tracefold
