#include "ctcpsim/world.hpp"

#include <algorithm>
#include <cmath>

#include "ctcpsim/errors.hpp"

namespace ctcpsim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Ordinary: return "Ordinary";
    case Role::PotentialClusterHead: return "PotentialClusterHead";
    case Role::ClusterHead: return "ClusterHead";
    case Role::Gateway: return "Gateway";
    case Role::Bridge: return "Bridge";
    case Role::Asleep: return "Asleep";
    case Role::Dead: return "Dead";
  }
  return "?";
}

void EnergyModel::validate() const {
  if (!(p_tx > p_rx && p_rx > p_sleep && p_sleep >= 0.0)) {
    throw ValidationError("energy model requires p_tx > p_rx > p_sleep >= 0");
  }
  if (!(bitrate > 0.0)) {
    throw ValidationError("bitrate must be > 0");
  }
  if (!(control_message_bytes > 0.0)) {
    throw ValidationError("control_message_bytes must be > 0");
  }
}

void MobilityParams::validate() const {
  if (!(width > 0.0 && height > 0.0)) {
    throw ValidationError("area dimensions must be > 0");
  }
  if (!(speed_min >= 0.0 && speed_min <= speed_max)) {
    throw ValidationError("mobility requires 0 <= speed_min <= speed_max");
  }
  if (!(pause_time >= 0.0)) {
    throw ValidationError("pause_time must be >= 0");
  }
}

Seconds estimated_lifetime(const Node& node, const EnergyModel& model, double power_fraction) {
  if (!(power_fraction > 0.0 && power_fraction <= 1.0)) {
    throw std::invalid_argument("power_fraction must lie in (0, 1]");
  }
  if (!node.alive()) {
    throw std::domain_error("lifetime of a dead node is undefined");
  }
  if (node.infinite_energy) {
    return std::numeric_limits<double>::infinity();
  }
  return node.energy / (model.p_rx + power_fraction * (model.p_tx - model.p_rx));
}

Joules drain(Node& node, Joules joules) {
  if (node.infinite_energy || !node.alive() || joules <= 0.0) {
    return node.energy;
  }
  node.energy = std::max(0.0, node.energy - joules);
  if (node.energy == 0.0) {
    node.role = Role::Dead;
    node.cluster_ids.clear();
  }
  return node.energy;
}

Joules consume(Node& node, const EnergyModel& model, Activity activity, double amount) {
  switch (activity) {
    case Activity::Active: return drain(node, model.p_rx * amount);
    case Activity::Sleep: return drain(node, model.p_sleep * amount);
    case Activity::TxMessage: return drain(node, model.per_message_tx_cost() * amount);
    case Activity::RxMessage: return drain(node, model.per_message_rx_cost() * amount);
  }
  return node.energy;
}

void draw_leg(Node& node, const MobilityParams& params, Rng& rng) {
  node.waypoint = {rng.uniform(0.0, params.width), rng.uniform(0.0, params.height)};
  node.speed = rng.uniform(params.speed_min, params.speed_max);
  node.at_waypoint = false;
}

void step_mobility(Node& node, const MobilityParams& params, Seconds now, Seconds dt, Rng& rng) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("mobility step requires dt > 0");
  }
  Seconds t = now;
  const Seconds end = now + dt;
  // Each pass either finishes a pause, reaches a waypoint or exhausts the step.
  while (t < end) {
    if (node.at_waypoint) {
      if (node.pause_until >= end) {
        break;
      }
      t = std::max(t, node.pause_until);
      draw_leg(node, params, rng);
      continue;
    }
    if (node.speed <= 0.0) {
      break;
    }
    const double dx = node.waypoint.x - node.position.x;
    const double dy = node.waypoint.y - node.position.y;
    const double dist = std::hypot(dx, dy);
    const Seconds to_arrival = dist / node.speed;
    if (t + to_arrival <= end) {
      node.position = node.waypoint;
      t += to_arrival;
      node.at_waypoint = true;
      node.pause_until = t + params.pause_time;
    } else {
      const double frac = (end - t) * node.speed / dist;
      node.position.x += dx * frac;
      node.position.y += dy * frac;
      t = end;
    }
  }
  node.position.x = std::clamp(node.position.x, 0.0, params.width);
  node.position.y = std::clamp(node.position.y, 0.0, params.height);
}

RadioGraph::RadioGraph(std::size_t id_space, double range)
    : adjacency_(id_space), present_(id_space, 0), range_(range) {}

RadioGraph RadioGraph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges,
                                  double range) {
  RadioGraph g(n, range);
  for (NodeId v = 0; v < n; ++v) {
    g.add_vertex(v);
  }
  for (auto [u, v] : edges) {
    g.add_edge(u, v);
  }
  return g;
}

void RadioGraph::add_vertex(NodeId v) {
  if (v >= adjacency_.size()) {
    adjacency_.resize(v + 1);
    present_.resize(v + 1, 0);
  }
  if (!present_[v]) {
    present_[v] = 1;
    vertices_.insert(std::lower_bound(vertices_.begin(), vertices_.end(), v), v);
  }
}

void RadioGraph::add_edge(NodeId u, NodeId v) {
  if (u == v) {
    return;
  }
  add_vertex(u);
  add_vertex(v);
  auto insert_sorted = [](std::vector<NodeId>& list, NodeId x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) {
      list.insert(it, x);
    }
  };
  insert_sorted(adjacency_[u], v);
  insert_sorted(adjacency_[v], u);
}

bool RadioGraph::has_edge(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) {
    return false;
  }
  return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
}

std::span<const NodeId> RadioGraph::neighbors(NodeId v) const {
  if (v >= adjacency_.size()) {
    return {};
  }
  return adjacency_[v];
}

std::size_t RadioGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : adjacency_) {
    twice += list.size();
  }
  return twice / 2;
}

bool in_scope(const Node& node, NodeScope scope) {
  switch (scope) {
    case NodeScope::Awake: return node.awake();
    case NodeScope::Alive: return node.alive();
    case NodeScope::Participants: return node.alive() && !node.infinite_energy;
  }
  return false;
}

RadioGraph build_radio_graph(std::span<const Node> nodes, double range, NodeScope scope) {
  return build_radio_graph(nodes, range, [scope](const Node& n) { return in_scope(n, scope); });
}

RadioGraph build_radio_graph(std::span<const Node> nodes, double range,
                             const std::function<bool(const Node&)>& keep) {
  std::size_t id_space = 0;
  for (const auto& n : nodes) {
    id_space = std::max<std::size_t>(id_space, n.id + 1);
  }
  RadioGraph g(id_space, range);
  std::vector<const Node*> selected;
  for (const auto& n : nodes) {
    if (keep(n)) {
      g.add_vertex(n.id);
      selected.push_back(&n);
    }
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    for (std::size_t j = i + 1; j < selected.size(); ++j) {
      if (distance(selected[i]->position, selected[j]->position) <= range) {
        g.add_edge(selected[i]->id, selected[j]->id);
      }
    }
  }
  return g;
}

std::vector<NodeId> World::participants() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes) {
    if (in_scope(n, NodeScope::Participants)) {
      out.push_back(n.id);
    }
  }
  return out;
}

}  // namespace ctcpsim
