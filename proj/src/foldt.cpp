#include "tracefold/foldt.hpp"

namespace tracefold {

std::string to_string(const StopReason& r) {
  if (r.is_end()) return "end-of-trace";
  return "collect-failed at chrono " + std::to_string(r.chrono);
}

std::optional<Event> Session::next() {
  if (closed_) throw Error("read from a closed session");
  if (exhausted_) return std::nullopt;
  auto e = source_->next();
  if (!e) {
    exhausted_ = true;
    return std::nullopt;
  }
  ++delivered_;
  return e;
}

void Session::close() {
  closed_ = true;
  source_.reset();
}

}  // namespace tracefold
