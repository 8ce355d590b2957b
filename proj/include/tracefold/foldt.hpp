#pragma once

// foldt: a monitor is (initialize, collect, post_process). The fold runs
// collect over the events of a trace, in order, until the end of the trace
// or until collect rejects an event; post_process is then applied to the
// last accepted accumulator.

#include <any>
#include <concepts>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tracefold/errors.hpp"
#include "tracefold/trace_io.hpp"

namespace tracefold {

// collect(e, acc) is split into a pure guard `admits` (absent = always) and
// a total in-place `update`. collect rejects e iff admits(e, acc) is false.
template <class Acc, class Res = Acc>
struct Monitor {
  std::string name;
  std::function<Acc()> initialize;
  std::function<bool(const Event&, const Acc&)> admits;
  std::function<void(const Event&, Acc&)> update;
  std::function<Res(Acc)> post_process;

  bool collect(const Event& e, Acc& acc) const {
    if (admits && !admits(e, acc)) return false;
    update(e, acc);
    return true;
  }
};

template <class Acc>
Monitor<Acc, Acc> make_monitor(std::string name, std::function<Acc()> initialize,
                               std::function<void(const Event&, Acc&)> update) {
  return Monitor<Acc, Acc>{std::move(name), std::move(initialize), nullptr, std::move(update),
                           [](Acc a) { return a; }};
}

struct StopReason {
  enum class Kind : std::uint8_t { end_of_trace, collect_failed };
  Kind kind = Kind::end_of_trace;
  std::uint64_t chrono = 0;  // the rejected event, for collect_failed

  static StopReason end_of_trace() { return {}; }
  static StopReason collect_failed(std::uint64_t c) { return {Kind::collect_failed, c}; }
  bool is_end() const noexcept { return kind == Kind::end_of_trace; }

  friend bool operator==(const StopReason&, const StopReason&) = default;
};

std::string to_string(const StopReason& r);

template <class Res>
struct FoldOutcome {
  Res result;
  StopReason stop;
  std::uint64_t events_consumed = 0;  // accepted events only
};

struct FoldOptions {
  // Re-runs collect on copies of the accumulator and checks both runs agree.
  bool verify_purity = false;
};

// Accumulators the purity check can compare. Type-erased ones opt out.
template <class Acc>
inline constexpr bool kComparableAccumulator = std::equality_comparable<Acc>;
template <>
inline constexpr bool kComparableAccumulator<std::any> = false;
template <>
inline constexpr bool kComparableAccumulator<std::vector<std::any>> = false;

class PurityViolation : public Error {
 public:
  using Error::Error;
};

// A single fold in progress, fed one event at a time.
template <class Acc, class Res>
class Fold {
 public:
  explicit Fold(const Monitor<Acc, Res>& monitor, FoldOptions options = {})
      : monitor_(monitor), options_(options), acc_(monitor.initialize()) {}

  // Returns false once the fold has stopped; the event that stops it is
  // consumed.
  bool offer(const Event& e) {
    if (stopped_) return false;
    if (options_.verify_purity) check_purity(e);
    if (!monitor_.collect(e, acc_)) {
      stopped_ = true;
      stop_ = StopReason::collect_failed(e.chrono);
      return false;
    }
    ++consumed_;
    return true;
  }

  bool stopped() const noexcept { return stopped_; }
  std::uint64_t consumed() const noexcept { return consumed_; }

  // Applies post_process. At most once per fold.
  FoldOutcome<Res> finish() {
    return FoldOutcome<Res>{monitor_.post_process(std::move(acc_)), stop_, consumed_};
  }

 private:
  void check_purity(const Event& e) const {
    if constexpr (kComparableAccumulator<Acc> && std::copy_constructible<Acc>) {
      Acc a = acc_;
      Acc b = acc_;
      bool ra = monitor_.collect(e, a);
      bool rb = monitor_.collect(e, b);
      if (ra != rb || !(a == b))
        throw PurityViolation("monitor '" + monitor_.name + "' is not a function of (event, " +
                              "accumulator) at event " + std::to_string(e.chrono));
    }
  }

  const Monitor<Acc, Res>& monitor_;
  FoldOptions options_;
  Acc acc_;
  bool stopped_ = false;
  StopReason stop_;
  std::uint64_t consumed_ = 0;
};

// A resumable position in a trace. Single consumer.
class Session {
 public:
  explicit Session(std::unique_ptr<TraceSource> source) : source_(std::move(source)) {}

  std::optional<Event> next();
  bool closed() const noexcept { return closed_; }
  // Drops the source; the session cannot be used afterwards.
  void close();
  std::uint64_t delivered() const noexcept { return delivered_; }
  TraceSource& source() { return *source_; }

 private:
  std::unique_ptr<TraceSource> source_;
  bool closed_ = false;
  bool exhausted_ = false;
  std::uint64_t delivered_ = 0;
};

template <class Acc, class Res>
FoldOutcome<Res> run_foldt(Session& session, const Monitor<Acc, Res>& monitor,
                           FoldOptions options = {}) {
  if (session.closed()) throw Error("run_foldt on a closed session");
  Fold<Acc, Res> fold(monitor, options);
  while (auto e = session.next())
    if (!fold.offer(*e)) break;
  return fold.finish();
}

template <class Acc, class Res>
std::vector<FoldOutcome<Res>> run_to_completion(
    Session& session, const Monitor<Acc, Res>& monitor,
    const std::function<void(const FoldOutcome<Res>&)>& on_interval = nullptr,
    FoldOptions options = {}) {
  std::vector<FoldOutcome<Res>> out;
  while (true) {
    out.push_back(run_foldt(session, monitor, options));
    if (on_interval) on_interval(out.back());
    if (out.back().stop.is_end()) return out;
  }
}

// Tuple of folds: collect continues iff both components continue.
template <class A1, class R1, class A2, class R2>
Monitor<std::pair<A1, A2>, std::pair<R1, R2>> product(Monitor<A1, R1> m1, Monitor<A2, R2> m2) {
  using Acc = std::pair<A1, A2>;
  Monitor<Acc, std::pair<R1, R2>> m;
  m.name = m1.name + "*" + m2.name;
  m.initialize = [i1 = m1.initialize, i2 = m2.initialize] { return Acc{i1(), i2()}; };
  if (m1.admits || m2.admits) {
    m.admits = [a1 = m1.admits, a2 = m2.admits](const Event& e, const Acc& acc) {
      bool ok1 = !a1 || a1(e, acc.first);
      bool ok2 = !a2 || a2(e, acc.second);
      return ok1 && ok2;
    };
  }
  m.update = [u1 = m1.update, u2 = m2.update](const Event& e, Acc& acc) {
    u1(e, acc.first);
    u2(e, acc.second);
  };
  m.post_process = [p1 = m1.post_process, p2 = m2.post_process](Acc acc) {
    return std::pair<R1, R2>{p1(std::move(acc.first)), p2(std::move(acc.second))};
  };
  return m;
}

template <class Acc, class Res>
Monitor<std::vector<Acc>, std::vector<Res>> product_all(std::vector<Monitor<Acc, Res>> ms) {
  auto shared = std::make_shared<const std::vector<Monitor<Acc, Res>>>(std::move(ms));
  Monitor<std::vector<Acc>, std::vector<Res>> m;
  for (const auto& c : *shared) m.name += (m.name.empty() ? "" : "*") + c.name;
  m.initialize = [shared] {
    std::vector<Acc> accs;
    accs.reserve(shared->size());
    for (const auto& c : *shared) accs.push_back(c.initialize());
    return accs;
  };
  bool any_guard = false;
  for (const auto& c : *shared) any_guard = any_guard || static_cast<bool>(c.admits);
  if (any_guard) {
    m.admits = [shared](const Event& e, const std::vector<Acc>& accs) {
      bool ok = true;
      for (std::size_t i = 0; i < shared->size(); ++i) {
        const auto& g = (*shared)[i].admits;
        if (g && !g(e, accs[i])) ok = false;
      }
      return ok;
    };
  }
  m.update = [shared](const Event& e, std::vector<Acc>& accs) {
    for (std::size_t i = 0; i < shared->size(); ++i) (*shared)[i].update(e, accs[i]);
  };
  m.post_process = [shared](std::vector<Acc> accs) {
    std::vector<Res> out;
    out.reserve(accs.size());
    for (std::size_t i = 0; i < accs.size(); ++i)
      out.push_back((*shared)[i].post_process(std::move(accs[i])));
    return out;
  };
  return m;
}

// Type-erased monitor whose result is a printable report.
using ReportMonitor = Monitor<std::any, std::string>;

template <class Acc, class Res>
ReportMonitor make_report(Monitor<Acc, Res> m, std::function<std::string(const Res&)> render) {
  ReportMonitor out;
  out.name = m.name;
  out.initialize = [init = m.initialize] { return std::any(init()); };
  if (m.admits) {
    out.admits = [g = m.admits](const Event& e, const std::any& acc) {
      return g(e, std::any_cast<const Acc&>(acc));
    };
  }
  out.update = [u = m.update](const Event& e, std::any& acc) { u(e, std::any_cast<Acc&>(acc)); };
  out.post_process = [p = m.post_process, render = std::move(render)](std::any acc) {
    return render(p(std::any_cast<Acc>(std::move(acc))));
  };
  return out;
}

// Push-mode run_to_completion: consumes events from a producer and restarts
// the fold after each rejection, reporting every interval.
template <class Acc, class Res>
class IntervalFoldSink final : public TraceSink {
 public:
  using Callback = std::function<void(const FoldOutcome<Res>&)>;

  IntervalFoldSink(const Monitor<Acc, Res>& monitor, Callback on_interval, FoldOptions options = {})
      : monitor_(monitor), on_interval_(std::move(on_interval)), options_(options) {
    start();
  }

  void accept(const Event& e) override {
    if (!fold_->offer(e)) {
      emit(fold_->finish());
      start();
    }
  }

  void finish() override {
    if (!fold_) return;
    emit(fold_->finish());
    fold_.reset();
  }

  const std::vector<FoldOutcome<Res>>& outcomes() const noexcept { return outcomes_; }

 private:
  void start() { fold_.emplace(monitor_, options_); }
  void emit(FoldOutcome<Res> o) {
    if (on_interval_) on_interval_(o);
    outcomes_.push_back(std::move(o));
  }

  const Monitor<Acc, Res>& monitor_;
  Callback on_interval_;
  FoldOptions options_;
  std::optional<Fold<Acc, Res>> fold_;
  std::vector<FoldOutcome<Res>> outcomes_;
};

}  // namespace tracefold
