#include <gtest/gtest.h>

#include "carebot/bus.hpp"

using namespace carebot;

TEST(Bus, NothingRunsBeforeDrain) {
  Bus bus;
  int seen = 0;
  bus.subscribe("a", [&](const BusMessage&) { ++seen; });
  bus.publish({"a", {}, 1});
  EXPECT_EQ(seen, 0);
  EXPECT_FALSE(bus.idle());
  EXPECT_EQ(bus.drain(), 1u);
  EXPECT_EQ(seen, 1);
  EXPECT_TRUE(bus.idle());
}

TEST(Bus, HandlerPublishesAreDeliveredFifo) {
  Bus bus;
  std::vector<std::string> trace;
  bus.subscribe("in", [&](const BusMessage& m) {
    trace.push_back("in" + m.payload.dump());
    bus.publish({"out", m.session, m.payload});
  });
  bus.subscribe("out", [&](const BusMessage& m) { trace.push_back("out" + m.payload.dump()); });
  bus.publish({"in", {}, 1});
  bus.publish({"in", {}, 2});
  EXPECT_EQ(bus.drain(), 4u);
  EXPECT_EQ(trace, (std::vector<std::string>{"in1", "in2", "out1", "out2"}));
  EXPECT_EQ(bus.delivered(), 4u);
}

TEST(Bus, EverySubscriberSeesTheMessage) {
  Bus bus;
  int a = 0;
  int b = 0;
  bus.subscribe("t", [&](const BusMessage&) { ++a; });
  bus.subscribe("t", [&](const BusMessage&) { ++b; });
  bus.subscribe("other", [&](const BusMessage&) { a += 100; });
  bus.publish({"t", {}, nullptr});
  bus.drain();
  EXPECT_EQ(a, 1);
  EXPECT_EQ(b, 1);
}

TEST(Bus, ClearDropsPending) {
  Bus bus;
  int seen = 0;
  bus.subscribe("t", [&](const BusMessage&) {
    ++seen;
    throw std::runtime_error("boom");
  });
  bus.publish({"t", {}, 1});
  bus.publish({"t", {}, 2});
  EXPECT_THROW(bus.drain(), std::runtime_error);
  EXPECT_FALSE(bus.idle());
  bus.clear();
  EXPECT_TRUE(bus.idle());
  EXPECT_EQ(seen, 1);
}
