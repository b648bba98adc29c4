#include "carebot/bus.hpp"

namespace carebot {

void Bus::subscribe(std::string_view topic, Handler handler) {
  handlers_[std::string(topic)].push_back(std::move(handler));
}

void Bus::publish(BusMessage message) { queue_.push_back(std::move(message)); }

std::size_t Bus::drain() {
  std::size_t count = 0;
  while (!queue_.empty()) {
    auto message = std::move(queue_.front());
    queue_.pop_front();
    ++count;
    ++delivered_;
    if (auto it = handlers_.find(message.topic); it != handlers_.end()) {
      for (const auto& handler : it->second) handler(message);
    }
  }
  return count;
}

}  // namespace carebot
