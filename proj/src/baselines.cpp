#include "ctcpsim/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "ctcpsim/errors.hpp"

namespace ctcpsim {

GafGrid::Cell gaf_cell_of(Vec2 p, double cell_size) {
  return {static_cast<long>(std::floor(p.x / cell_size)), static_cast<long>(std::floor(p.y / cell_size))};
}

GafGrid gaf_assign_cells(std::span<const Node> nodes, double range, Seconds rotation_period) {
  if (!(range > 0.0)) {
    throw std::invalid_argument("GAF needs a positive radio range");
  }
  GafGrid grid;
  grid.cell_size = gaf_cell_size(range);
  grid.rotation_period = rotation_period;
  for (const auto& n : nodes) {
    if (in_scope(n, NodeScope::Participants)) {
      grid.cells[gaf_cell_of(n.position, grid.cell_size)].push_back(n.id);
    }
  }
  for (auto& [cell, ids] : grid.cells) {
    std::sort(ids.begin(), ids.end());
  }
  return grid;
}

void gaf_rotate_leaders(GafGrid& grid, std::span<Node> nodes) {
  grid.leader.clear();
  for (const auto& [cell, ids] : grid.cells) {
    const Node* best = nullptr;
    for (NodeId id : ids) {
      const Node& n = nodes[id];
      if (!n.alive()) {
        continue;
      }
      if (best == nullptr || n.energy > best->energy) {
        best = &n;
      }
    }
    if (best == nullptr) {
      continue;
    }
    grid.leader[cell] = best->id;
    for (NodeId id : ids) {
      Node& n = nodes[id];
      if (n.alive()) {
        n.role = id == best->id ? Role::Ordinary : Role::Asleep;
        n.cluster_ids.clear();
      }
    }
  }
}

Clustering cec_cluster_round(const RadioGraph& graph, const Lifetimes& lifetimes, Seconds period,
                             Seconds now) {
  HeadElection election = elect_potential_heads(graph, lifetimes);
  // CEC announces heads directly; no potential stage.
  election.stats.head_announce = election.stats.potential_head_announce;
  election.stats.potential_head_announce = 0;
  HeadElection cover = complete_head_cover(graph, lifetimes, election.heads);
  election.heads.insert(cover.heads.begin(), cover.heads.end());
  election.stats.head_announce += cover.stats.potential_head_announce;
  const auto& heads = election.heads;

  Clustering c;
  c.stats = election.stats;
  for (NodeId h : heads) {
    Cluster cl;
    cl.id = h;
    cl.head = h;
    cl.head_lifetime = lifetimes[h];
    for (NodeId u : graph.neighbors(h)) {
      if (!heads.contains(u)) {
        cl.members.insert(u);
      }
    }
    cl.ri = period;
    cl.effective_alpha = cl.head_lifetime > 0.0 ? period / cl.head_lifetime : 0.0;
    cl.next_recluster_at = now + period;
    c.clusters.push_back(std::move(cl));
  }

  for (NodeId v : graph.vertices()) {
    add_broadcast(c.traffic, graph, v);
    if (heads.contains(v)) {
      c.roles[v] = Role::ClusterHead;
      c.membership[v] = {v};
      add_broadcast(c.traffic, graph, v);
      continue;
    }
    c.roles[v] = Role::Asleep;
    for (NodeId u : graph.neighbors(v)) {
      if (heads.contains(u)) {
        c.membership[v].insert(u);
      }
    }
  }

  // Candidates hearing more than one head announce themselves; per head pair
  // the longest-lived one stays on.
  std::map<std::pair<NodeId, NodeId>, NodeId> chosen;
  for (const auto& [v, clusters] : c.membership) {
    if (heads.contains(v) || clusters.size() < 2) {
      continue;
    }
    c.stats.gateway_notify += graph.degree(v);
    add_broadcast(c.traffic, graph, v);
    const std::vector<NodeId> adj(clusters.begin(), clusters.end());
    for (std::size_t i = 0; i < adj.size(); ++i) {
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        auto [it, inserted] = chosen.emplace(std::make_pair(adj[i], adj[j]), v);
        const NodeId cur = it->second;
        if (!inserted && (lifetimes[v] > lifetimes[cur] || (lifetimes[v] == lifetimes[cur] && v < cur))) {
          it->second = v;
        }
      }
    }
  }
  for (const auto& [pair, g] : chosen) {
    c.roles[g] = Role::Gateway;
    for (NodeId h : {pair.first, pair.second}) {
      Cluster* cl = c.cluster(h);
      cl->gateways.insert(g);
      cl->governing_lifetime[g] = lifetimes[g];
      c.links.push_back({g, h, graph.range()});
    }
  }
  c.phases_run = 3;
  return c;
}

Clustering run_cec_round(World& world, Seconds period, Seconds now) {
  const auto participants = world.participants();
  if (participants.empty()) {
    throw NetworkExhausted();
  }
  for (NodeId id : participants) {
    world.nodes[id].role = Role::Ordinary;
    world.nodes[id].cluster_ids.clear();
  }
  const RadioGraph graph = build_radio_graph(world.nodes, world.range, NodeScope::Participants);
  Clustering c = cec_cluster_round(graph, full_power_lifetimes(world), period, now);
  apply_roles(world, c);
  charge_control_energy(world, c.traffic);
  return c;
}

}  // namespace ctcpsim
