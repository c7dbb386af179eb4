#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctcpsim/traffic.hpp"
#include "ctcpsim/world.hpp"

namespace ctcpsim {

struct MetricSample {
  Seconds time = 0.0;
  std::size_t alive = 0;  // finite-energy nodes with energy left
  Joules energy = 0.0;    // summed over finite-energy nodes
  std::size_t awake = 0;  // finite-energy nodes with the radio on
};

struct PartitionEvent {
  Seconds time = 0.0;
  std::size_t component_count = 0;  // of the awake graph
};

struct MetricsLog {
  std::vector<MetricSample> samples;
  std::vector<Packet> packets;
  std::vector<PartitionEvent> partition_events;  // onsets only
  std::size_t partitioned_samples = 0;           // samples with a separated flow
  std::size_t split_samples = 0;                 // samples whose awake graph has >1 component
};

MetricSample sample(const World& world, Seconds now);

std::size_t count_components(const RadioGraph& graph);

struct PartitionCheck {
  bool partitioned = false;
  std::size_t component_count = 0;
};

// True iff some flow active at `now` has its endpoints in different
// components of the awake graph. When `reference` is given, only separations
// the reference graph does not share are counted.
PartitionCheck detect_partitions(const RadioGraph& awake, std::span<const Flow> flows, Seconds now,
                                 const RelayFilter& relay = {}, const RadioGraph* reference = nullptr);

}  // namespace ctcpsim
