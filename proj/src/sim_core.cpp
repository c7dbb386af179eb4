#include "ctcpsim/sim_core.hpp"

#include <string>

namespace ctcpsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MobilityStep: return "MobilityStep";
    case EventKind::ReclusterTrigger: return "ReclusterTrigger";
    case EventKind::PacketEmit: return "PacketEmit";
    case EventKind::PacketHop: return "PacketHop";
    case EventKind::EnergyTick: return "EnergyTick";
    case EventKind::Sample: return "Sample";
    case EventKind::SimEnd: return "SimEnd";
  }
  return "?";
}

void SimClock::advance_to(Seconds t) {
  if (t < now_) {
    throw std::logic_error("simulation clock cannot move backwards");
  }
  now_ = t;
}

EventHandle Scheduler::schedule(Seconds time, EventKind kind, std::uint64_t subject) {
  if (!(time >= clock_.now())) {
    throw std::logic_error("event scheduled in the past at t=" + std::to_string(time) +
                           " (now=" + std::to_string(clock_.now()) + ")");
  }
  const std::uint64_t seq = next_sequence_++;
  queue_.emplace(Key{time, seq}, Event{time, seq, kind, subject});
  index_.emplace(seq, time);
  return seq;
}

bool Scheduler::cancel(EventHandle handle) {
  auto it = index_.find(handle);
  if (it == index_.end()) {
    return false;
  }
  queue_.erase(Key{it->second, handle});
  index_.erase(it);
  return true;
}

std::size_t Scheduler::run_until(Seconds t_end, const Handler& handler) {
  if (t_end < clock_.now()) {
    throw std::logic_error("run_until target lies in the past");
  }
  std::size_t fired = 0;
  while (!queue_.empty()) {
    auto first = queue_.begin();
    if (first->first.first > t_end) {
      break;
    }
    const Event ev = first->second;
    queue_.erase(first);
    index_.erase(ev.sequence);
    clock_.advance_to(ev.time);
    handler(ev);
    ++fired;
  }
  clock_.advance_to(t_end);
  return fired;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1)));
}

}  // namespace ctcpsim
