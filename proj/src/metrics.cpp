#include "ctcpsim/metrics.hpp"

namespace ctcpsim {

MetricSample sample(const World& world, Seconds now) {
  MetricSample s;
  s.time = now;
  for (const auto& n : world.nodes) {
    if (n.infinite_energy) {
      continue;
    }
    s.energy += n.energy;
    if (n.alive()) {
      ++s.alive;
    }
    if (n.awake()) {
      ++s.awake;
    }
  }
  return s;
}

std::size_t count_components(const RadioGraph& graph) {
  std::vector<char> seen(graph.id_space(), 0);
  std::size_t count = 0;
  for (NodeId root : graph.vertices()) {
    if (seen[root]) {
      continue;
    }
    ++count;
    std::vector<NodeId> stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : graph.neighbors(v)) {
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return count;
}

PartitionCheck detect_partitions(const RadioGraph& awake, std::span<const Flow> flows, Seconds now,
                                 const RelayFilter& relay, const RadioGraph* reference) {
  PartitionCheck out;
  for (const auto& f : flows) {
    if (!f.active_at(now)) {
      continue;
    }
    if (reachable(awake, f.src, f.dst, relay)) {
      continue;
    }
    if (reference != nullptr && !reachable(*reference, f.src, f.dst, relay)) {
      continue;
    }
    out.partitioned = true;
    break;
  }
  out.component_count = count_components(awake);
  return out;
}

}  // namespace ctcpsim
