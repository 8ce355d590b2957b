#pragma once

// Event sources and sinks: in-memory traces, per-module filtering,
// attribute masking, recording to the line-delimited trace format and replay.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracefold/event.hpp"

namespace tracefold {

inline constexpr int kTraceFormatVersion = 1;
inline constexpr std::string_view kTraceFormatName = "tracefold-trace";

// Pull-based, single-consumer stream of events in increasing chrono order.
class TraceSource {
 public:
  virtual ~TraceSource() = default;
  // nullopt means end of trace; further calls keep returning nullopt.
  virtual std::optional<Event> next() = 0;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void accept(const Event& event) = 0;
  virtual void finish() {}
};

class NullSink final : public TraceSink {
 public:
  void accept(const Event&) override {}
};

class VectorSink final : public TraceSink {
 public:
  void accept(const Event& event) override { events.push_back(event); }
  std::vector<Event> events;
};

class VectorSource final : public TraceSource {
 public:
  explicit VectorSource(std::vector<Event> events) : events_(std::move(events)) {}
  std::optional<Event> next() override;

 private:
  std::vector<Event> events_;
  std::size_t pos_ = 0;
};

std::vector<Event> drain(TraceSource& source);

// Per-module event granularity. Modules without an explicit entry use the
// default granularity.
class EventFilter {
 public:
  enum class Granularity : std::uint8_t { all, external_only, none };

  EventFilter() = default;
  static EventFilter everything() { return EventFilter{}; }
  static EventFilter nothing() {
    EventFilter f;
    f.default_ = PortSet::of(Granularity::none);
    return f;
  }

  EventFilter& set(const std::string& module, Granularity g);
  EventFilter& set_default(Granularity g);
  // Arbitrary admitted port set for a module. A set that admits any port
  // but excludes `call` is rejected: call events must be present whenever
  // a procedure emits events at all.
  EventFilter& set_ports(const std::string& module, const std::set<Port>& ports);

  // "module=all|external|none"; module "*" sets the default.
  EventFilter& parse_rule(std::string_view rule);

  bool admits(const std::string& decl_module, Port port) const noexcept {
    auto it = modules_.find(decl_module);
    const PortSet& ps = it == modules_.end() ? default_ : it->second;
    return ps.has(port);
  }
  bool admits(const Event& e) const noexcept { return admits(e.proc.decl_module, e.port); }
  bool is_identity() const noexcept;

 private:
  struct PortSet {
    std::uint16_t bits = 0;
    static PortSet of(Granularity g);
    bool has(Port p) const noexcept { return (bits >> static_cast<unsigned>(p)) & 1U; }
  };

  PortSet default_ = PortSet::of(Granularity::all);
  std::map<std::string, PortSet, std::less<>> modules_;
};

// Passes through the admitted events; chrono values are left untouched.
class FilteredSource final : public TraceSource {
 public:
  FilteredSource(std::unique_ptr<TraceSource> inner, EventFilter filter)
      : inner_(std::move(inner)), filter_(std::move(filter)) {}
  std::optional<Event> next() override;

 private:
  std::unique_ptr<TraceSource> inner_;
  EventFilter filter_;
};

class MaskedSource final : public TraceSource {
 public:
  MaskedSource(std::unique_ptr<TraceSource> inner, AttributeMask mask)
      : inner_(std::move(inner)), mask_(mask) {}
  std::optional<Event> next() override;

 private:
  std::unique_ptr<TraceSource> inner_;
  AttributeMask mask_;
};

std::unique_ptr<TraceSource> filtered(std::unique_ptr<TraceSource> source, EventFilter filter);

// One event per line, fixed field order. Masked attributes are omitted.
std::string encode_event(const Event& event);
// `mask` is the header's mask; `line_no` is used in error messages.
Event decode_event(std::string_view line, AttributeMask mask, std::size_t line_no);
std::string encode_header(AttributeMask mask);

// Sink writing the trace format. Rejects non-increasing chrono values.
class TraceWriter final : public TraceSink {
 public:
  TraceWriter(const std::filesystem::path& path, AttributeMask mask);
  void accept(const Event& event) override;
  void finish() override;
  std::uint64_t events_written() const noexcept { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  AttributeMask mask_;
  std::uint64_t count_ = 0;
  std::uint64_t last_chrono_ = 0;
};

// Writes every event of `source` to `path`; returns the number written.
std::uint64_t record(TraceSource& source, const std::filesystem::path& path, AttributeMask mask);

class ReplaySource final : public TraceSource {
 public:
  explicit ReplaySource(const std::filesystem::path& path);
  std::optional<Event> next() override;
  AttributeMask mask() const noexcept { return mask_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  AttributeMask mask_;
  std::size_t line_no_ = 1;
  std::uint64_t last_chrono_ = 0;
  bool done_ = false;
};

std::unique_ptr<ReplaySource> replay(const std::filesystem::path& path);

// Bounded, blocking hand-off between a producer thread and the single
// consumer. Delivery is ordered and lossless.
class EventChannel {
 public:
  explicit EventChannel(std::size_t capacity = 1024) : capacity_(capacity) {}

  // Blocks while full. Returns false once the consumer has closed the channel.
  bool push(Event event);
  // Producer side: no more events. An error, when given, is rethrown to the
  // consumer after the buffered events.
  void finish(std::exception_ptr error = nullptr);
  // Blocks while empty; nullopt at end of stream.
  std::optional<Event> pop();
  // Consumer side: stop accepting events.
  void close();

 private:
  std::mutex mu_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<Event> buffer_;
  std::size_t capacity_;
  bool finished_ = false;
  bool closed_ = false;
  std::exception_ptr error_;
};

}  // namespace tracefold
