#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctcpsim/sim_core.hpp"

using namespace ctcpsim;

namespace {

std::vector<Event> drain(Scheduler& s, Seconds until) {
  std::vector<Event> fired;
  s.run_until(until, [&](const Event& e) { fired.push_back(e); });
  return fired;
}

}  // namespace

TEST_CASE("events fire at their scheduled time") {
  Scheduler s;
  s.run_until(3.0, [](const Event&) {});
  s.schedule(5.0, EventKind::Sample);
  const auto fired = drain(s, 10.0);
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].time == 5.0);
  CHECK(s.now() == 10.0);
}

TEST_CASE("equal times fire in insertion order, including events added while firing") {
  Scheduler s;
  s.run_until(3.0, [](const Event&) {});
  s.schedule(3.0, EventKind::Sample, 1);
  s.schedule(3.0, EventKind::Sample, 2);
  std::vector<std::uint64_t> order;
  s.run_until(3.0, [&](const Event& e) {
    order.push_back(e.subject);
    if (e.subject == 1) s.schedule(3.0, EventKind::Sample, 3);
  });
  CHECK(order == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("scheduling in the past is a logic error") {
  Scheduler s;
  s.run_until(3.0, [](const Event&) {});
  CHECK_THROWS_AS(s.schedule(1.0, EventKind::Sample), std::logic_error);
}

TEST_CASE("cancel") {
  Scheduler s;
  const auto a = s.schedule(1.0, EventKind::Sample, 1);
  const auto b = s.schedule(2.0, EventKind::Sample, 2);
  CHECK(s.cancel(b));
  CHECK_FALSE(s.cancel(b));
  const auto fired = drain(s, 5.0);
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].subject == 1);
  CHECK_FALSE(s.cancel(a));
}

TEST_CASE("run_until") {
  Scheduler empty;
  CHECK(empty.run_until(100.0, [](const Event&) {}) == 0);
  CHECK(empty.now() == 100.0);

  Scheduler s;
  for (double t : {1.0, 2.0, 3.0}) s.schedule(t, EventKind::Sample);
  CHECK(s.run_until(2.0, [](const Event&) {}) == 2);
  CHECK(s.now() == 2.0);
  CHECK(s.pending() == 1);
  CHECK_THROWS_AS(s.run_until(1.0, [](const Event&) {}), std::logic_error);
}

TEST_CASE("clock never moves backwards") {
  SimClock c;
  c.advance_to(2.0);
  c.advance_to(2.0);
  CHECK_THROWS(c.advance_to(1.0));
}

TEST_CASE("property: random schedule/cancel sequences dequeue sorted by (time, sequence)") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Scheduler s;
    std::vector<EventHandle> handles;
    for (int i = 0; i < 60; ++i) {
      const double t = std::floor(rng.uniform(0.0, 10.0));  // force many ties
      handles.push_back(s.schedule(t, EventKind::Sample, static_cast<std::uint64_t>(i)));
      if (rng.uniform() < 0.3) s.cancel(handles[rng.next_u64() % handles.size()]);
    }
    const auto fired = drain(s, 10.0);
    for (std::size_t i = 1; i < fired.size(); ++i) {
      const bool ordered = fired[i - 1].time < fired[i].time ||
                           (fired[i - 1].time == fired[i].time && fired[i - 1].sequence < fired[i].sequence);
      REQUIRE(ordered);
    }
  }
}

TEST_CASE("same seed, same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng u(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("substreams depend on the stream index only through the hash") {
  Rng s0 = Rng::substream(5, 0);
  Rng s0_again = Rng::substream(5, 0);
  Rng s1 = Rng::substream(5, 1);
  CHECK(s0.next_u64() == s0_again.next_u64());
  CHECK(s0.seed() != s1.seed());
  CHECK(Rng::substream(5, 3).seed() == Rng::substream(5, 3).seed());
  CHECK(Rng::substream(6, 3).seed() != Rng::substream(5, 3).seed());
}
