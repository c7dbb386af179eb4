#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ctcpsim/sim_core.hpp"

namespace ctcpsim {

using NodeId = std::uint32_t;
using ClusterId = NodeId;  // a cluster is named after its head
using Joules = double;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

enum class Role { Ordinary, PotentialClusterHead, ClusterHead, Gateway, Bridge, Asleep, Dead };

std::string_view to_string(Role role);

inline bool is_awake(Role role) { return role != Role::Asleep && role != Role::Dead; }

struct Node {
  NodeId id = 0;
  Vec2 position;
  Vec2 waypoint;
  double speed = 0.0;
  Seconds pause_until = 0.0;
  bool at_waypoint = false;  // paused, waiting to draw the next leg
  Role role = Role::Ordinary;
  std::set<ClusterId> cluster_ids;
  Joules energy = 0.0;
  bool infinite_energy = false;

  bool alive() const { return role != Role::Dead; }
  bool awake() const { return is_awake(role); }
};

struct EnergyModel {
  double p_tx = 1.4;      // W, transmit at full power
  double p_rx = 1.0;      // W, receive / idle listen
  double p_sleep = 0.015; // W, radio off
  double bitrate = 2e6;   // bit/s
  double control_message_bytes = 64;

  // Control-message costs, draw x airtime.
  Joules per_message_tx_cost() const { return tx_cost(control_message_bytes); }
  Joules per_message_rx_cost() const { return rx_cost(control_message_bytes); }
  Joules tx_cost(double bytes) const { return p_tx * airtime(bytes); }
  Joules rx_cost(double bytes) const { return p_rx * airtime(bytes); }
  Seconds airtime(double bytes) const { return bytes * 8.0 / bitrate; }

  // Throws ValidationError unless p_tx > p_rx > p_sleep >= 0.
  void validate() const;

  bool operator==(const EnergyModel&) const = default;
};

struct MobilityParams {
  double width = 1500.0;
  double height = 300.0;
  double speed_min = 0.0;
  double speed_max = 20.0;
  Seconds pause_time = 0.0;

  void validate() const;

  bool operator==(const MobilityParams&) const = default;
};

enum class Activity { Active, Sleep, TxMessage, RxMessage };

// Residual energy over projected draw at the given fraction of full transmit
// power. Infinite-energy nodes report +inf; dead nodes throw.
Seconds estimated_lifetime(const Node& node, const EnergyModel& model, double power_fraction = 1.0);

// `amount` is a duration for Active/Sleep and a message count otherwise.
Joules consume(Node& node, const EnergyModel& model, Activity activity, double amount);

// Removes `joules`, floored at zero. A finite node reaching zero turns Dead.
Joules drain(Node& node, Joules joules);

// Random-waypoint step over [now, now + dt]. Arrival mid-step clamps to the
// waypoint and the rest of the step counts toward the pause.
void step_mobility(Node& node, const MobilityParams& params, Seconds now, Seconds dt, Rng& rng);

// Draws a fresh leg: uniform waypoint in the area, uniform speed.
void draw_leg(Node& node, const MobilityParams& params, Rng& rng);

class RadioGraph {
 public:
  RadioGraph() = default;
  RadioGraph(std::size_t id_space, double range);

  static RadioGraph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges,
                               double range = 1.0);

  void add_vertex(NodeId v);
  void add_edge(NodeId u, NodeId v);

  bool contains(NodeId v) const { return v < present_.size() && present_[v]; }
  bool has_edge(NodeId u, NodeId v) const;
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  const std::vector<NodeId>& vertices() const { return vertices_; }
  std::size_t id_space() const { return adjacency_.size(); }
  std::size_t edge_count() const;
  double range() const { return range_; }

 private:
  std::vector<std::vector<NodeId>> adjacency_;  // sorted neighbor lists
  std::vector<char> present_;
  std::vector<NodeId> vertices_;                // sorted
  double range_ = 0.0;
};

enum class NodeScope {
  Awake,         // alive and radio on
  Alive,         // alive, awake or asleep
  Participants,  // alive finite-energy nodes (the clustered population)
};

bool in_scope(const Node& node, NodeScope scope);

// Unit-disk graph: edge iff distance <= range (closed ball).
RadioGraph build_radio_graph(std::span<const Node> nodes, double range,
                             NodeScope scope = NodeScope::Awake);
RadioGraph build_radio_graph(std::span<const Node> nodes, double range,
                             const std::function<bool(const Node&)>& keep);

struct World {
  std::vector<Node> nodes;  // nodes[i].id == i
  EnergyModel energy;
  MobilityParams mobility;
  double range = 250.0;

  std::vector<NodeId> participants() const;
};

}  // namespace ctcpsim
