#include "ctcpsim/traffic.hpp"

#include <deque>

#include "ctcpsim/errors.hpp"

namespace ctcpsim {

void Flow::validate() const {
  if (src == dst) {
    throw ValidationError("flow requires src != dst");
  }
  if (!(rate > 0.0)) {
    throw ValidationError("flow requires rate > 0");
  }
  if (!(packet_size > 0.0)) {
    throw ValidationError("flow requires packet_size > 0");
  }
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::NoRoute: return "NoRoute";
    case DropReason::NodeDied: return "NodeDied";
    case DropReason::Partition: return "Partition";
    case DropReason::Expired: return "Expired";
  }
  return "?";
}

std::vector<Seconds> cbr_emission_times(const Flow& flow) {
  std::vector<Seconds> out;
  if (!(flow.rate > 0.0)) {
    return out;
  }
  for (std::uint64_t k = 0;; ++k) {
    const Seconds t = flow.start + static_cast<double>(k) / flow.rate;
    if (t >= flow.stop) {
      break;
    }
    out.push_back(t);
  }
  return out;
}

std::vector<int> hop_distances_to(const RadioGraph& graph, NodeId dst, const RelayFilter& relay) {
  std::vector<int> dist(graph.id_space(), -1);
  if (!graph.contains(dst)) {
    return dist;
  }
  std::deque<NodeId> queue{dst};
  dist[dst] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (v != dst && relay && !relay(v)) {
      continue;  // reached, but does not forward
    }
    for (NodeId u : graph.neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::optional<std::vector<NodeId>> shortest_path(const RadioGraph& graph, NodeId from, NodeId dst,
                                                 const RelayFilter& relay) {
  if (!graph.contains(from) || !graph.contains(dst)) {
    return std::nullopt;
  }
  const auto dist = hop_distances_to(graph, dst, relay);
  if (dist[from] < 0) {
    return std::nullopt;
  }
  std::vector<NodeId> path{from};
  NodeId cur = from;
  while (cur != dst) {
    NodeId next = cur;
    for (NodeId u : graph.neighbors(cur)) {  // ascending ids
      if (dist[u] == dist[cur] - 1 && (u == dst || !relay || relay(u))) {
        next = u;
        break;
      }
    }
    if (next == cur) {
      return std::nullopt;
    }
    path.push_back(next);
    cur = next;
  }
  return path;
}

bool reachable(const RadioGraph& graph, NodeId from, NodeId dst, const RelayFilter& relay) {
  if (!graph.contains(from) || !graph.contains(dst)) {
    return false;
  }
  return hop_distances_to(graph, dst, relay)[from] >= 0;
}

RouteDecision route(const Packet& packet, const RadioGraph& awake, const RelayFilter& relay,
                    const RadioGraph* reference) {
  RouteDecision out;
  out.path = shortest_path(awake, packet.holder(), packet.dst, relay);
  if (!out.path) {
    const bool physically_reachable =
        reference == nullptr || reachable(*reference, packet.holder(), packet.dst, relay);
    out.drop = physically_reachable ? DropReason::Partition : DropReason::NoRoute;
  }
  return out;
}

std::optional<Seconds> average_delay(std::span<const Packet> packets, Seconds t0, Seconds t1) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : packets) {
    if (p.delivered_at && *p.delivered_at >= t0 && *p.delivered_at <= t1) {
      sum += *p.delivered_at - p.emitted_at;
      ++count;
    }
  }
  if (count == 0) {
    return std::nullopt;
  }
  return sum / static_cast<double>(count);
}

}  // namespace ctcpsim
