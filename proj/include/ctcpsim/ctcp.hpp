#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "ctcpsim/world.hpp"

namespace ctcpsim {

struct CtcpParams {
  double alpha = 0.5;         // RI = alpha * head lifetime, 0 < alpha < 1
  double alpha_safety = 0.9;  // margin below the weakest gateway when alpha is reduced
  bool bridge_search_enabled = true;
  double bridge_power_fraction = 0.5;
  bool attach_endpoints = true;  // keep one awake access node per source/sink neighbourhood
  Seconds min_lifetime = 1.0;    // nodes expected to die sooner sit the round out, asleep

  void validate() const;

  bool operator==(const CtcpParams&) const = default;
};

enum class Strength { Strong, Weak };
enum class GatewayKind { Primary, Secondary };

std::string_view to_string(Strength s);
std::string_view to_string(GatewayKind k);

struct GatewayStatus {
  NodeId gateway = 0;
  NodeId head = 0;
  Strength strength = Strength::Weak;
  GatewayKind kind = GatewayKind::Primary;

  bool operator==(const GatewayStatus&) const = default;
};

// Counted in exchanges: one broadcast reaching k neighbours counts k.
struct MessageStats {
  std::uint64_t discovery = 0;
  std::uint64_t potential_head_announce = 0;
  std::uint64_t gateway_notify = 0;
  std::uint64_t head_announce = 0;
  std::uint64_t bridge_search = 0;

  std::uint64_t total() const {
    return discovery + potential_head_announce + gateway_notify + head_announce + bridge_search;
  }
  MessageStats& operator+=(const MessageStats& o);
  bool operator==(const MessageStats&) const = default;
};

struct Cluster {
  ClusterId id = 0;
  NodeId head = 0;
  std::set<NodeId> members;   // non-head one-hop neighbours of the head
  std::set<NodeId> gateways;  // awake gateways serving this cluster
  std::set<NodeId> bridges;
  std::set<NodeId> access;    // awake attachment points of sources/sinks
  // Lifetime that must outlast `ri` for every awake non-head node above.
  std::map<NodeId, Seconds> governing_lifetime;
  Seconds head_lifetime = 0.0;
  double effective_alpha = 0.0;
  Seconds ri = 0.0;
  Seconds next_recluster_at = 0.0;
};

struct MonitoredLink {
  NodeId a = 0;
  NodeId b = 0;
  double max_distance = 0.0;
};

// Per-node control-message transmissions and receptions of one round.
struct ControlTraffic {
  std::map<NodeId, std::uint64_t> tx;
  std::map<NodeId, std::uint64_t> rx;
};

struct Clustering {
  std::vector<Cluster> clusters;  // ascending head id
  std::vector<GatewayStatus> statuses;
  std::map<NodeId, Role> roles;
  std::map<NodeId, std::set<ClusterId>> membership;
  std::vector<MonitoredLink> links;  // awake links the backbone depends on
  MessageStats stats;
  ControlTraffic traffic;
  int phases_run = 0;

  const Cluster* cluster(ClusterId id) const;
  Cluster* cluster(ClusterId id);
  std::set<NodeId> heads() const;
  Seconds earliest_recluster() const;
};

using Lifetimes = std::vector<Seconds>;  // indexed by node id

struct HeadElection {
  std::set<NodeId> heads;
  MessageStats stats;
};

// Phase 1: a node is a potential head iff it beats every neighbour on
// (lifetime desc, id asc).
HeadElection elect_potential_heads(const RadioGraph& graph, const Lifetimes& lifetimes);

// Nodes that heard no potential-head announcement self-elect in
// (lifetime desc, id asc) order unless a neighbour already did, so the final
// head set is an independent dominating set. Returns only the new heads.
HeadElection complete_head_cover(const RadioGraph& graph, const Lifetimes& lifetimes,
                                 const std::set<NodeId>& potential_heads);

Strength classify_strength(Seconds gateway_lifetime, Seconds head_lifetime, double alpha);

struct GatewayClassification {
  std::vector<GatewayStatus> statuses;
  MessageStats stats;
};

// Phase 2.
GatewayClassification classify_gateways(const RadioGraph& graph, const std::set<NodeId>& heads,
                                        const Lifetimes& lifetimes, const CtcpParams& params);

// Phase 3: clusters, backbone selection, roles and intervals.
Clustering finalize_clusters(const RadioGraph& graph, const std::set<NodeId>& heads,
                             std::vector<GatewayStatus> statuses, const Lifetimes& lifetimes,
                             const CtcpParams& params);

// Recomputes effective alpha and ri from the cluster's governing lifetimes.
void update_interval(Cluster& cluster, const CtcpParams& params);

struct BridgeOutcome {
  std::optional<NodeId> bridge;
  Seconds reduced_lifetime = 0.0;
  bool strong = false;
};

BridgeOutcome bridge_search(const GatewayStatus& weak, const Clustering& clustering,
                            const RadioGraph& graph, std::span<const Node> nodes,
                            const Lifetimes& lifetimes, const EnergyModel& model,
                            const CtcpParams& params, MessageStats& stats);

// Full round over the world's participants at time `now`: wakes everyone,
// runs phases 1-3 (plus bridge search), applies roles and charges control
// energy. Throws NetworkExhausted when no participant is alive.
Clustering run_clustering_round(World& world, const CtcpParams& params, Seconds now);

// Helpers shared with the baselines and the engine.
Lifetimes full_power_lifetimes(const World& world);
void apply_roles(World& world, const Clustering& clustering);
void charge_control_energy(World& world, const ControlTraffic& traffic);
void add_broadcast(ControlTraffic& traffic, const RadioGraph& graph, NodeId sender);

}  // namespace ctcpsim
