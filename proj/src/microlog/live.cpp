#include "tracefold/microlog.hpp"

namespace tracefold::microlog {

namespace {

struct Cancelled {};

class ChannelSink final : public TraceSink {
 public:
  explicit ChannelSink(EventChannel& channel) : channel_(channel) {}
  void accept(const Event& event) override {
    if (!channel_.push(event)) throw Cancelled{};
  }

 private:
  EventChannel& channel_;
};

}  // namespace

LiveTrace::LiveTrace(std::shared_ptr<const Program> program, Query query, SolveOptions options,
                     std::size_t capacity)
    : program_(std::move(program)),
      query_(std::move(query)),
      options_(std::move(options)),
      channel_(capacity) {
  worker_ = std::thread([this] {
    ChannelSink sink(channel_);
    try {
      result_ = solve(*program_, query_, &sink, options_);
      channel_.finish();
    } catch (const Cancelled&) {
      channel_.finish();
    } catch (const RuntimeError& e) {
      result_ = e.partial();
      channel_.finish(std::current_exception());
    } catch (...) {
      channel_.finish(std::current_exception());
    }
  });
}

LiveTrace::~LiveTrace() {
  channel_.close();
  if (!joined_) worker_.join();
}

std::optional<Event> LiveTrace::next() { return channel_.pop(); }

const SolveResult& LiveTrace::result() {
  if (!joined_) {
    // unread events would keep the producer blocked
    channel_.close();
    worker_.join();
    joined_ = true;
  }
  return result_;
}

}  // namespace tracefold::microlog
