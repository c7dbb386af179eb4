#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <utility>

namespace ctcpsim {

using Seconds = double;

enum class EventKind {
  MobilityStep,
  ReclusterTrigger,
  PacketEmit,
  PacketHop,
  EnergyTick,
  Sample,
  SimEnd,
};

std::string_view to_string(EventKind kind);

struct Event {
  Seconds time = 0.0;
  std::uint64_t sequence = 0;  // assigned by the scheduler
  EventKind kind = EventKind::SimEnd;
  std::uint64_t subject = 0;   // node, packet or cluster id, depending on kind
};

using EventHandle = std::uint64_t;

class SimClock {
 public:
  Seconds now() const { return now_; }
  void advance_to(Seconds t);

 private:
  Seconds now_ = 0.0;
};

// Pending events ordered by (time, sequence). Sequence numbers are handed out
// in insertion order, so equal-time events fire FIFO.
class Scheduler {
 public:
  using Handler = std::function<void(const Event&)>;

  Seconds now() const { return clock_.now(); }

  // Throws std::logic_error when `time` lies in the past.
  EventHandle schedule(Seconds time, EventKind kind, std::uint64_t subject = 0);
  bool cancel(EventHandle handle);

  // Fires every event with time <= t_end, then parks the clock at t_end.
  std::size_t run_until(Seconds t_end, const Handler& handler);

  std::size_t pending() const { return queue_.size(); }

 private:
  using Key = std::pair<Seconds, std::uint64_t>;

  SimClock clock_;
  std::uint64_t next_sequence_ = 0;
  std::map<Key, Event> queue_;
  std::unordered_map<EventHandle, Seconds> index_;
};

// mt19937_64 with a splitmix64-derived per-stream seed. The engine and its
// output are fully specified by the standard, so runs are bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ctcpsim
