#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ctcpsim/world.hpp"

namespace ctcpsim {

struct Flow {
  NodeId src = 0;
  NodeId dst = 0;
  double rate = 4.0;          // packets per second
  double packet_size = 512.0; // bytes
  Seconds start = 0.0;
  Seconds stop = 0.0;

  bool active_at(Seconds t) const { return start <= t && t < stop; }
  void validate() const;
};

enum class DropReason { NoRoute, NodeDied, Partition, Expired };

std::string_view to_string(DropReason reason);

struct Packet {
  std::uint64_t id = 0;
  std::size_t flow = 0;
  NodeId src = 0;
  NodeId dst = 0;
  Seconds emitted_at = 0.0;
  std::vector<NodeId> hops;  // every node that held the packet, src first
  std::optional<Seconds> delivered_at;
  std::optional<DropReason> drop_reason;

  NodeId holder() const { return hops.empty() ? src : hops.back(); }
  bool resolved() const { return delivered_at.has_value() || drop_reason.has_value(); }
};

// CBR: one packet every 1/rate seconds in [start, stop).
std::vector<Seconds> cbr_emission_times(const Flow& flow);

// Nodes allowed to forward; endpoints never need to be relays. Empty means
// every node may relay.
using RelayFilter = std::function<bool(NodeId)>;

// Hop distance to `dst` for every node, -1 when unreachable. Only relays are
// expanded.
std::vector<int> hop_distances_to(const RadioGraph& graph, NodeId dst, const RelayFilter& relay = {});

// Shortest-hop path from -> dst (both included), lexicographically smallest
// id sequence among the shortest ones. nullopt when dst is unreachable.
std::optional<std::vector<NodeId>> shortest_path(const RadioGraph& graph, NodeId from, NodeId dst,
                                                 const RelayFilter& relay = {});

bool reachable(const RadioGraph& graph, NodeId from, NodeId dst, const RelayFilter& relay = {});

struct RouteDecision {
  std::optional<std::vector<NodeId>> path;
  std::optional<DropReason> drop;
};

// Routes the packet from its current holder over the awake graph. An
// unreachable destination is a Partition, unless `reference` (the graph of
// every alive node) cannot reach it either, which makes it NoRoute.
RouteDecision route(const Packet& packet, const RadioGraph& awake, const RelayFilter& relay = {},
                    const RadioGraph* reference = nullptr);

// Mean delay of packets delivered within [t0, t1]; nullopt with no deliveries.
std::optional<Seconds> average_delay(std::span<const Packet> packets, Seconds t0, Seconds t1);

}  // namespace ctcpsim
