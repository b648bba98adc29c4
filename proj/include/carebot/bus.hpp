#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "carebot/context_store.hpp"

namespace carebot {

namespace topics {
inline constexpr std::string_view kUtterancesIn = "utterances.in";
inline constexpr std::string_view kUtterancesOut = "utterances.out";
inline constexpr std::string_view kActions = "actions";
inline constexpr std::string_view kActionsDone = "actions.done";
}  // namespace topics

struct BusMessage {
  std::string topic;
  SessionId session;
  nlohmann::json payload;
};

/// In-process publish/subscribe for one session. Messages are delivered in
/// publish order, which keeps every topic FIFO. Nothing runs until drain().
class Bus {
 public:
  using Handler = std::function<void(const BusMessage&)>;

  void subscribe(std::string_view topic, Handler handler);
  void publish(BusMessage message);

  /// Delivers queued messages, including ones published by handlers, until
  /// the queue is empty. Returns the number delivered.
  std::size_t drain();

  /// Drops undelivered messages, e.g. after a handler threw.
  void clear() { queue_.clear(); }
  bool idle() const { return queue_.empty(); }
  std::size_t delivered() const { return delivered_; }

 private:
  std::map<std::string, std::vector<Handler>, std::less<>> handlers_;
  std::deque<BusMessage> queue_;
  std::size_t delivered_ = 0;
};

}  // namespace carebot
