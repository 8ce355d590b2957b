#include "tracefold/microlog.hpp"

#include <algorithm>

namespace tracefold::microlog {

const std::vector<BuiltinInfo>& builtin_table() {
  static const std::vector<BuiltinInfo> table = {
      {"is", 2, Determinism::det},         {"=", 2, Determinism::semidet},
      {"\\=", 2, Determinism::semidet},    {"<", 2, Determinism::semidet},
      {">", 2, Determinism::semidet},      {"=<", 2, Determinism::semidet},
      {">=", 2, Determinism::semidet},     {"=:=", 2, Determinism::semidet},
      {"=\\=", 2, Determinism::semidet},   {"true", 0, Determinism::det},
      {"fail", 0, Determinism::failure},   {"write", 1, Determinism::det},
      {"nl", 0, Determinism::det},
  };
  return table;
}

std::optional<Determinism> builtin_determinism(std::string_view name, std::uint32_t arity) {
  for (const auto& b : builtin_table())
    if (b.name == name && b.arity == arity) return b.det;
  return std::nullopt;
}

const Predicate* Program::find(std::string_view name, std::uint32_t arity) const {
  auto i = index_of(name, arity);
  return i ? &predicates[*i] : nullptr;
}

std::optional<std::size_t> Program::index_of(std::string_view name, std::uint32_t arity) const {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i].name == name && predicates[i].arity == arity) return i;
  return std::nullopt;
}

namespace {

void collect_sites(const Goal& g, const std::string& caller, std::vector<CallSite>& out) {
  if (g.kind == Goal::Kind::call) {
    out.push_back(CallSite{g.name, static_cast<std::uint32_t>(g.args.size()), g.line.value_or(0),
                           caller});
    return;
  }
  for (const auto& c : g.children) collect_sites(c, caller, out);
}

}  // namespace

std::vector<CallSite> Program::call_sites() const {
  std::vector<CallSite> out;
  for (const auto& p : predicates) {
    std::string caller = p.name + "/" + std::to_string(p.arity);
    for (const auto& c : p.clauses)
      if (c.body) collect_sites(*c.body, caller, out);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CallSite& a, const CallSite& b) { return a.line < b.line; });
  return out;
}

std::string Solution::to_string() const {
  if (bindings.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    if (i) out += ", ";
    out += bindings[i].first;
    out += " = ";
    out += tracefold::to_string(bindings[i].second);
  }
  return out;
}

}  // namespace tracefold::microlog
