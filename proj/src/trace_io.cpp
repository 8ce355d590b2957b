#include "tracefold/trace_io.hpp"

#include <json.hpp>

#include <stdexcept>

namespace tracefold {

using ojson = nlohmann::ordered_json;

std::optional<Event> VectorSource::next() {
  if (pos_ >= events_.size()) return std::nullopt;
  return events_[pos_++];
}

std::vector<Event> drain(TraceSource& source) {
  std::vector<Event> out;
  while (auto e = source.next()) out.push_back(std::move(*e));
  return out;
}

// ---------------------------------------------------------------------------
// Filtering

EventFilter::PortSet EventFilter::PortSet::of(Granularity g) {
  PortSet ps;
  for (Port p : kAllPorts) {
    bool in = g == Granularity::all || (g == Granularity::external_only && is_external(p));
    if (in) ps.bits |= static_cast<std::uint16_t>(1U << static_cast<unsigned>(p));
  }
  return ps;
}

EventFilter& EventFilter::set(const std::string& module, Granularity g) {
  modules_[module] = PortSet::of(g);
  return *this;
}

EventFilter& EventFilter::set_default(Granularity g) {
  default_ = PortSet::of(g);
  return *this;
}

EventFilter& EventFilter::set_ports(const std::string& module, const std::set<Port>& ports) {
  if (!ports.empty() && !ports.contains(Port::call))
    throw std::invalid_argument("filter for module '" + module +
                                "' admits events but excludes call: call events must be present");
  PortSet ps;
  for (Port p : ports) ps.bits |= static_cast<std::uint16_t>(1U << static_cast<unsigned>(p));
  modules_[module] = ps;
  return *this;
}

EventFilter& EventFilter::parse_rule(std::string_view rule) {
  auto eq = rule.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw std::invalid_argument("filter rule must be module=all|external|none, got '" +
                                std::string(rule) + "'");
  std::string module(rule.substr(0, eq));
  auto level = rule.substr(eq + 1);
  Granularity g;
  if (level == "all")
    g = Granularity::all;
  else if (level == "external")
    g = Granularity::external_only;
  else if (level == "none")
    g = Granularity::none;
  else
    throw std::invalid_argument("unknown filter granularity '" + std::string(level) + "'");
  return module == "*" ? set_default(g) : set(module, g);
}

bool EventFilter::is_identity() const noexcept {
  auto full = PortSet::of(Granularity::all).bits;
  if (default_.bits != full) return false;
  for (const auto& [m, ps] : modules_)
    if (ps.bits != full) return false;
  return true;
}

std::optional<Event> FilteredSource::next() {
  while (auto e = inner_->next())
    if (filter_.admits(*e)) return e;
  return std::nullopt;
}

std::optional<Event> MaskedSource::next() {
  auto e = inner_->next();
  if (!e) return e;
  return apply_mask(std::move(*e), mask_);
}

std::unique_ptr<TraceSource> filtered(std::unique_ptr<TraceSource> source, EventFilter filter) {
  return std::make_unique<FilteredSource>(std::move(source), std::move(filter));
}

// ---------------------------------------------------------------------------
// Encoding

std::string encode_header(AttributeMask mask) {
  ojson h;
  h["format"] = kTraceFormatName;
  h["version"] = kTraceFormatVersion;
  h["mask"] = mask.names();
  return h.dump();
}

std::string encode_event(const Event& e) {
  ojson j;
  j["chrono"] = e.chrono;
  j["call"] = e.call;
  j["depth"] = e.depth;
  j["port"] = to_string(e.port);
  j["det"] = to_string(e.det);
  j["proc"] = ojson{{"type", to_string(e.proc.kind)},  {"def_module", e.proc.def_module},
                    {"decl_module", e.proc.decl_module}, {"name", e.proc.name},
                    {"arity", e.proc.arity},               {"mode", e.proc.mode_number}};
  ojson path = ojson::array();
  for (const auto& s : e.goal_path) path.push_back(to_string(s));
  j["goal_path"] = std::move(path);
  if (e.args) {
    ojson a = ojson::array();
    for (const auto& t : *e.args) a.push_back(to_string(t));
    j["args"] = std::move(a);
  }
  if (e.arg_types) j["arg_types"] = *e.arg_types;
  if (e.local_vars) {
    ojson lv = ojson::array();
    for (const auto& v : *e.local_vars)
      lv.push_back(ojson{{"name", v.name}, {"value", to_string(v.value)}, {"type", v.type_name}});
    j["local_vars"] = std::move(lv);
  }
  if (e.line_number) j["line"] = *e.line_number;
  return j.dump();
}

namespace {

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw TraceIntegrityError("malformed trace record at line " + std::to_string(line_no) + ": " +
                            what);
}

template <typename T>
T field(const ojson& j, const char* name, std::size_t line_no) {
  auto it = j.find(name);
  if (it == j.end()) malformed(line_no, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(line_no, std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

Event decode_event(std::string_view line, AttributeMask mask, std::size_t line_no) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& ex) {
    malformed(line_no, ex.what());
  }
  if (!j.is_object()) malformed(line_no, "record is not an object");

  static const std::set<std::string> known = {"chrono", "call", "depth", "port", "det",
                                              "proc", "goal_path", "args", "arg_types",
                                              "local_vars", "line"};
  for (const auto& [k, v] : j.items())
    if (!known.contains(k)) malformed(line_no, "unknown field '" + k + "'");

  Event e;
  e.mask = mask;
  try {
    e.chrono = field<std::uint64_t>(j, "chrono", line_no);
    e.call = field<std::uint64_t>(j, "call", line_no);
    e.depth = field<std::uint32_t>(j, "depth", line_no);
    e.port = parse_port(field<std::string>(j, "port", line_no));
    e.det = parse_determinism(field<std::string>(j, "det", line_no));
    auto proc = field<ojson>(j, "proc", line_no);
    if (!proc.is_object()) malformed(line_no, "proc is not an object");
    e.proc.kind = parse_proc_kind(field<std::string>(proc, "type", line_no));
    e.proc.def_module = field<std::string>(proc, "def_module", line_no);
    e.proc.decl_module = field<std::string>(proc, "decl_module", line_no);
    e.proc.name = field<std::string>(proc, "name", line_no);
    e.proc.arity = field<std::uint32_t>(proc, "arity", line_no);
    e.proc.mode_number = field<std::uint32_t>(proc, "mode", line_no);
    for (const auto& s : field<std::vector<std::string>>(j, "goal_path", line_no))
      e.goal_path.push_back(parse_goal_path_step(s));
  } catch (const std::invalid_argument& ex) {
    malformed(line_no, ex.what());
  }

  auto check_optional = [&](const char* name, OptionalAttribute attr, bool required) {
    bool present = j.contains(name);
    if (present && !mask.has(attr))
      malformed(line_no, std::string("field '") + name + "' present but masked in header");
    if (required && !present && mask.has(attr))
      malformed(line_no, std::string("missing field '") + name + "'");
    return present;
  };

  try {
    if (check_optional("args", OptionalAttribute::args, true)) {
      std::vector<Term> args;
      for (const auto& s : field<std::vector<std::string>>(j, "args", line_no))
        args.push_back(parse_term(s));
      e.args = std::move(args);
    }
    if (check_optional("arg_types", OptionalAttribute::arg_types, true))
      e.arg_types = field<std::vector<std::string>>(j, "arg_types", line_no);
    if (check_optional("local_vars", OptionalAttribute::local_vars, true)) {
      auto lv = field<ojson>(j, "local_vars", line_no);
      if (!lv.is_array()) malformed(line_no, "local_vars is not an array");
      std::vector<LiveVar> vars;
      for (const auto& v : lv) {
        if (!v.is_object()) malformed(line_no, "local_vars entry is not an object");
        vars.push_back(LiveVar{field<std::string>(v, "name", line_no),
                               parse_term(field<std::string>(v, "value", line_no)),
                               field<std::string>(v, "type", line_no)});
      }
      e.local_vars = std::move(vars);
    }
    if (check_optional("line", OptionalAttribute::line_number, false))
      e.line_number = field<std::uint32_t>(j, "line", line_no);
  } catch (const ParseError& ex) {
    malformed(line_no, ex.what());
  }
  return e;
}

// ---------------------------------------------------------------------------
// Recording

TraceWriter::TraceWriter(const std::filesystem::path& path, AttributeMask mask)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), mask_(mask) {
  if (!out_) throw IoError("cannot open trace file for writing: " + path.string());
  out_ << encode_header(mask_) << '\n';
}

void TraceWriter::accept(const Event& event) {
  if (event.chrono <= last_chrono_)
    throw TraceIntegrityError("event chrono " + std::to_string(event.chrono) +
                              " does not follow chrono " + std::to_string(last_chrono_));
  last_chrono_ = event.chrono;
  out_ << encode_event(apply_mask(event, mask_)) << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
  ++count_;
}

void TraceWriter::finish() {
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
}

std::uint64_t record(TraceSource& source, const std::filesystem::path& path, AttributeMask mask) {
  TraceWriter writer(path, mask);
  while (auto e = source.next()) writer.accept(*e);
  writer.finish();
  return writer.events_written();
}

// ---------------------------------------------------------------------------
// Replay

ReplaySource::ReplaySource(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open trace file: " + path.string());
  std::string header;
  if (!std::getline(in_, header) || in_.eof())
    throw TraceIntegrityError("trace file " + path.string() + " has no complete header line");
  ojson h;
  try {
    h = ojson::parse(header);
  } catch (const nlohmann::json::parse_error& ex) {
    malformed(1, ex.what());
  }
  if (!h.is_object() || h.value("format", std::string()) != kTraceFormatName)
    malformed(1, "not a " + std::string(kTraceFormatName) + " file");
  int version = field<int>(h, "version", 1);
  if (version != kTraceFormatVersion) throw TraceVersionError(version, kTraceFormatVersion);
  AttributeMask mask;
  for (const auto& name : field<std::vector<std::string>>(h, "mask", 1)) {
    auto attr = parse_optional_attribute(name);
    if (!attr) malformed(1, "unknown attribute '" + name + "' in header mask");
    mask = mask.with(*attr);
  }
  mask_ = mask;
}

std::optional<Event> ReplaySource::next() {
  if (done_) return std::nullopt;
  std::string line;
  if (!std::getline(in_, line)) {
    if (in_.bad()) throw IoError("read failed: " + path_.string());
    done_ = true;
    return std::nullopt;
  }
  ++line_no_;
  // every record is LF-terminated; a missing terminator means truncation
  if (in_.eof()) malformed(line_no_, "truncated record (no line terminator)");
  Event e = decode_event(line, mask_, line_no_);
  if (e.chrono <= last_chrono_)
    throw TraceIntegrityError("trace record at line " + std::to_string(line_no_) + " has chrono " +
                              std::to_string(e.chrono) + " not after " +
                              std::to_string(last_chrono_));
  last_chrono_ = e.chrono;
  return e;
}

std::unique_ptr<ReplaySource> replay(const std::filesystem::path& path) {
  return std::make_unique<ReplaySource>(path);
}

// ---------------------------------------------------------------------------
// Channel

bool EventChannel::push(Event event) {
  std::unique_lock lock(mu_);
  not_full_.wait(lock, [&] { return closed_ || buffer_.size() < capacity_; });
  if (closed_) return false;
  buffer_.push_back(std::move(event));
  not_empty_.notify_one();
  return true;
}

void EventChannel::finish(std::exception_ptr error) {
  std::lock_guard lock(mu_);
  finished_ = true;
  error_ = std::move(error);
  not_empty_.notify_all();
}

std::optional<Event> EventChannel::pop() {
  std::unique_lock lock(mu_);
  not_empty_.wait(lock, [&] { return finished_ || !buffer_.empty(); });
  if (!buffer_.empty()) {
    Event e = std::move(buffer_.front());
    buffer_.pop_front();
    not_full_.notify_one();
    return e;
  }
  if (error_) {
    auto err = std::exchange(error_, nullptr);
    std::rethrow_exception(err);
  }
  return std::nullopt;
}

void EventChannel::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  buffer_.clear();
  not_full_.notify_all();
}

}  // namespace tracefold
