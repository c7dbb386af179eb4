#include "ctcpsim/ctcp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "ctcpsim/errors.hpp"

namespace ctcpsim {

namespace {

// Strict priority used for every election: longer lifetime wins, lower id
// breaks ties.
bool outranks(NodeId a, NodeId b, const Lifetimes& lifetimes) {
  if (lifetimes[a] != lifetimes[b]) {
    return lifetimes[a] > lifetimes[b];
  }
  return a < b;
}

struct DisjointSets {
  std::map<NodeId, NodeId> parent;

  NodeId find(NodeId x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) {
      return x;
    }
    NodeId root = find(it->second);
    parent[x] = root;
    return root;
  }

  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      return false;
    }
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::vector<NodeId> adjacent_heads(const RadioGraph& graph, NodeId v, const std::set<NodeId>& heads) {
  std::vector<NodeId> out;
  for (NodeId u : graph.neighbors(v)) {
    if (heads.contains(u)) {
      out.push_back(u);
    }
  }
  return out;
}

std::vector<int> component_labels(const RadioGraph& graph) {
  std::vector<int> label(graph.id_space(), -1);
  int next = 0;
  for (NodeId root : graph.vertices()) {
    if (label[root] >= 0) {
      continue;
    }
    std::vector<NodeId> stack{root};
    label[root] = next;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId u : graph.neighbors(v)) {
        if (label[u] < 0) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

void protect(Cluster& cluster, NodeId node, Seconds lifetime) {
  auto [it, inserted] = cluster.governing_lifetime.emplace(node, lifetime);
  if (!inserted) {
    it->second = std::max(it->second, lifetime);
  }
}

void attach_endpoints(World& world, const RadioGraph& graph, Clustering& c, const Lifetimes& lifetimes) {
  const auto label = component_labels(graph);
  for (const Node& s : world.nodes) {
    if (!s.infinite_energy || !s.alive()) {
      continue;
    }
    // Best candidate per adjacent component: awake first, then nearest, then lowest id.
    std::map<int, std::tuple<bool, double, NodeId>> best;
    for (NodeId v : graph.vertices()) {
      const double d = distance(s.position, world.nodes[v].position);
      if (d > world.range) {
        continue;
      }
      const bool asleep = c.roles[v] == Role::Asleep;
      auto key = std::make_tuple(asleep, d, v);
      auto [it, inserted] = best.emplace(label[v], key);
      if (!inserted && key < it->second) {
        it->second = key;
      }
    }
    for (const auto& [comp, choice] : best) {
      const NodeId v = std::get<2>(choice);
      c.links.push_back({s.id, v, world.range});
      if (!std::get<0>(choice)) {
        continue;
      }
      const auto& clusters_of_v = c.membership[v];
      const bool multi = clusters_of_v.size() >= 2;
      c.roles[v] = multi ? Role::Gateway : Role::Ordinary;
      for (ClusterId h : clusters_of_v) {
        Cluster* cl = c.cluster(h);
        if (cl == nullptr) {
          continue;
        }
        (multi ? cl->gateways : cl->access).insert(v);
        protect(*cl, v, lifetimes[v]);
        if (graph.has_edge(v, h)) {
          c.links.push_back({v, h, world.range});
        }
      }
    }
  }
}

}  // namespace

void CtcpParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha violates 0 < alpha < 1");
  }
  if (!(alpha_safety > 0.0 && alpha_safety < 1.0)) {
    throw ValidationError("alpha_safety violates 0 < alpha_safety < 1");
  }
  if (!(bridge_power_fraction > 0.0 && bridge_power_fraction <= 1.0)) {
    throw ValidationError("bridge_power_fraction violates 0 < fraction <= 1");
  }
  if (!(min_lifetime >= 0.0)) {
    throw ValidationError("min_lifetime must be >= 0");
  }
}

std::string_view to_string(Strength s) { return s == Strength::Strong ? "Strong" : "Weak"; }
std::string_view to_string(GatewayKind k) { return k == GatewayKind::Primary ? "Primary" : "Secondary"; }

MessageStats& MessageStats::operator+=(const MessageStats& o) {
  discovery += o.discovery;
  potential_head_announce += o.potential_head_announce;
  gateway_notify += o.gateway_notify;
  head_announce += o.head_announce;
  bridge_search += o.bridge_search;
  return *this;
}

const Cluster* Clustering::cluster(ClusterId id) const {
  auto it = std::lower_bound(clusters.begin(), clusters.end(), id,
                             [](const Cluster& c, ClusterId x) { return c.id < x; });
  return (it != clusters.end() && it->id == id) ? &*it : nullptr;
}

Cluster* Clustering::cluster(ClusterId id) {
  return const_cast<Cluster*>(std::as_const(*this).cluster(id));
}

std::set<NodeId> Clustering::heads() const {
  std::set<NodeId> out;
  for (const auto& c : clusters) {
    out.insert(c.head);
  }
  return out;
}

Seconds Clustering::earliest_recluster() const {
  Seconds t = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) {
    t = std::min(t, c.next_recluster_at);
  }
  return t;
}

HeadElection elect_potential_heads(const RadioGraph& graph, const Lifetimes& lifetimes) {
  HeadElection out;
  for (NodeId v : graph.vertices()) {
    const auto nbrs = graph.neighbors(v);
    out.stats.discovery += nbrs.size();
    const bool longest = std::all_of(nbrs.begin(), nbrs.end(),
                                     [&](NodeId u) { return outranks(v, u, lifetimes); });
    if (longest) {
      out.heads.insert(v);
      out.stats.potential_head_announce += nbrs.size();
    }
  }
  return out;
}

HeadElection complete_head_cover(const RadioGraph& graph, const Lifetimes& lifetimes,
                                 const std::set<NodeId>& potential_heads) {
  std::vector<char> covered(graph.id_space(), 0);
  for (NodeId h : potential_heads) {
    covered[h] = 1;
    for (NodeId u : graph.neighbors(h)) {
      covered[u] = 1;
    }
  }
  std::vector<NodeId> order;
  for (NodeId v : graph.vertices()) {
    if (!covered[v]) {
      order.push_back(v);
    }
  }
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return outranks(a, b, lifetimes); });

  HeadElection out;
  for (NodeId v : order) {
    if (covered[v]) {
      continue;
    }
    out.heads.insert(v);
    out.stats.potential_head_announce += graph.degree(v);
    covered[v] = 1;
    for (NodeId u : graph.neighbors(v)) {
      covered[u] = 1;
    }
  }
  return out;
}

Strength classify_strength(Seconds gateway_lifetime, Seconds head_lifetime, double alpha) {
  return gateway_lifetime > alpha * head_lifetime ? Strength::Strong : Strength::Weak;
}

GatewayClassification classify_gateways(const RadioGraph& graph, const std::set<NodeId>& heads,
                                        const Lifetimes& lifetimes, const CtcpParams& params) {
  GatewayClassification out;
  for (NodeId v : graph.vertices()) {
    if (heads.contains(v)) {
      continue;
    }
    const auto direct = adjacent_heads(graph, v, heads);
    if (direct.empty()) {
      continue;
    }
    if (direct.size() >= 2) {
      for (NodeId h : direct) {
        out.statuses.push_back({v, h, classify_strength(lifetimes[v], lifetimes[h], params.alpha),
                                GatewayKind::Primary});
      }
    }
    // Heads reachable through a non-head neighbour but not directly.
    std::set<NodeId> far;
    for (NodeId w : graph.neighbors(v)) {
      if (heads.contains(w)) {
        continue;
      }
      for (NodeId h : graph.neighbors(w)) {
        if (heads.contains(h) && !std::binary_search(direct.begin(), direct.end(), h)) {
          far.insert(h);
        }
      }
    }
    for (NodeId h : far) {
      out.statuses.push_back({v, h, classify_strength(lifetimes[v], lifetimes[h], params.alpha),
                              GatewayKind::Secondary});
    }
  }
  out.stats.gateway_notify = out.statuses.size();
  return out;
}

void update_interval(Cluster& cluster, const CtcpParams& params) {
  const Seconds nominal = params.alpha * cluster.head_lifetime;
  Seconds weakest = std::numeric_limits<double>::infinity();
  for (const auto& [node, lifetime] : cluster.governing_lifetime) {
    if (!(lifetime > nominal)) {
      weakest = std::min(weakest, lifetime);
    }
  }
  cluster.effective_alpha = params.alpha;
  if (weakest != std::numeric_limits<double>::infinity()) {
    cluster.effective_alpha =
        std::min(params.alpha, params.alpha_safety * weakest / cluster.head_lifetime);
  }
  cluster.ri = cluster.effective_alpha * cluster.head_lifetime;
}

Clustering finalize_clusters(const RadioGraph& graph, const std::set<NodeId>& heads,
                             std::vector<GatewayStatus> statuses, const Lifetimes& lifetimes,
                             const CtcpParams& params) {
  Clustering c;
  c.statuses = std::move(statuses);

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
    c.stats.head_announce += graph.degree(h);
    c.clusters.push_back(std::move(cl));
  }

  for (NodeId v : graph.vertices()) {
    if (heads.contains(v)) {
      c.roles[v] = Role::ClusterHead;
      c.membership[v] = {v};
    } else {
      c.roles[v] = Role::Asleep;
      const auto direct = adjacent_heads(graph, v, heads);
      c.membership[v] = std::set<ClusterId>(direct.begin(), direct.end());
    }
  }

  // Nodes with no adjacent head join the cluster of an already clustered
  // neighbour; repeated until nothing changes.
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v : graph.vertices()) {
      if (!c.membership[v].empty()) {
        continue;
      }
      for (NodeId u : graph.neighbors(v)) {
        if (!c.membership[u].empty()) {
          c.membership[v] = {*c.membership[u].begin()};
          changed = true;
          break;
        }
      }
    }
  }

  DisjointSets linked;
  auto activate = [&](NodeId g, std::initializer_list<ClusterId> served) {
    c.roles[g] = Role::Gateway;
    for (ClusterId h : served) {
      c.membership[g].insert(h);
      Cluster* cl = c.cluster(h);
      cl->gateways.insert(g);
      protect(*cl, g, lifetimes[g]);
    }
  };

  // One primary gateway per adjacent head pair: the longest-lived candidate.
  std::map<std::pair<NodeId, NodeId>, NodeId> primary;
  for (NodeId v : graph.vertices()) {
    if (heads.contains(v)) {
      continue;
    }
    const auto direct = adjacent_heads(graph, v, heads);
    for (std::size_t i = 0; i < direct.size(); ++i) {
      for (std::size_t j = i + 1; j < direct.size(); ++j) {
        auto [it, inserted] = primary.emplace(std::make_pair(direct[i], direct[j]), v);
        if (!inserted && outranks(v, it->second, lifetimes)) {
          it->second = v;
        }
      }
    }
  }
  for (const auto& [pair, g] : primary) {
    activate(g, {pair.first, pair.second});
    linked.unite(pair.first, pair.second);
    c.links.push_back({g, pair.first, graph.range()});
    c.links.push_back({g, pair.second, graph.range()});
  }

  // Secondary links (head - u - w - head') for pairs without a primary
  // gateway, strongest bottleneck first, only while the pair is unlinked.
  struct Candidate {
    NodeId near_node;  // adjacent to pair.first
    NodeId far_node;   // adjacent to pair.second
    Seconds bottleneck;
  };
  std::map<std::pair<NodeId, NodeId>, Candidate> secondary;
  for (const auto& s : c.statuses) {
    if (s.kind != GatewayKind::Secondary) {
      continue;
    }
    const NodeId u = s.gateway;
    for (NodeId h_near : adjacent_heads(graph, u, heads)) {
      auto key = std::minmax(h_near, s.head);
      if (primary.contains({key.first, key.second})) {
        continue;
      }
      for (NodeId w : graph.neighbors(u)) {
        if (heads.contains(w) || !graph.has_edge(w, s.head)) {
          continue;
        }
        Candidate cand = h_near < s.head ? Candidate{u, w, 0.0} : Candidate{w, u, 0.0};
        cand.bottleneck = std::min(lifetimes[u], lifetimes[w]);
        auto [it, inserted] = secondary.emplace(std::make_pair(key.first, key.second), cand);
        if (!inserted) {
          const Candidate& cur = it->second;
          if (std::make_tuple(-cand.bottleneck, cand.near_node, cand.far_node) <
              std::make_tuple(-cur.bottleneck, cur.near_node, cur.far_node)) {
            it->second = cand;
          }
        }
      }
    }
  }
  std::vector<std::pair<std::pair<NodeId, NodeId>, Candidate>> ordered(secondary.begin(),
                                                                       secondary.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    return a.second.bottleneck > b.second.bottleneck;
  });
  for (const auto& [pair, cand] : ordered) {
    if (!linked.unite(pair.first, pair.second)) {
      continue;
    }
    activate(cand.near_node, {pair.first, pair.second});
    activate(cand.far_node, {pair.first, pair.second});
    c.links.push_back({pair.first, cand.near_node, graph.range()});
    c.links.push_back({cand.near_node, cand.far_node, graph.range()});
    c.links.push_back({cand.far_node, pair.second, graph.range()});
  }

  for (auto& cl : c.clusters) {
    update_interval(cl, params);
    cl.next_recluster_at = cl.ri;
  }
  c.phases_run = 3;
  return c;
}

BridgeOutcome bridge_search(const GatewayStatus& weak, const Clustering& clustering,
                            const RadioGraph& graph, std::span<const Node> nodes,
                            const Lifetimes& lifetimes, const EnergyModel& model,
                            const CtcpParams& params, MessageStats& stats) {
  BridgeOutcome out;
  ++stats.bridge_search;
  const Cluster* cl = clustering.cluster(weak.head);
  if (cl == nullptr) {
    return out;
  }
  const Seconds nominal = params.alpha * cl->head_lifetime;
  const double reach = params.bridge_power_fraction * graph.range();
  const Node& gw = nodes[weak.gateway];
  for (NodeId v : graph.neighbors(weak.gateway)) {
    if (v == cl->head || !cl->members.contains(v)) {
      continue;
    }
    if (distance(gw.position, nodes[v].position) > reach) {
      continue;
    }
    if (lifetimes[v] > nominal) {
      out.bridge = v;  // neighbours are sorted, so this is the lowest id
      break;
    }
  }
  if (out.bridge) {
    out.reduced_lifetime = estimated_lifetime(gw, model, params.bridge_power_fraction);
    out.strong = out.reduced_lifetime > nominal;
  }
  return out;
}

Lifetimes full_power_lifetimes(const World& world) {
  Lifetimes out(world.nodes.size(), 0.0);
  for (const auto& n : world.nodes) {
    if (n.alive()) {
      out[n.id] = estimated_lifetime(n, world.energy, 1.0);
    }
  }
  return out;
}

void add_broadcast(ControlTraffic& traffic, const RadioGraph& graph, NodeId sender) {
  ++traffic.tx[sender];
  for (NodeId u : graph.neighbors(sender)) {
    ++traffic.rx[u];
  }
}

void apply_roles(World& world, const Clustering& clustering) {
  for (const auto& [id, role] : clustering.roles) {
    Node& n = world.nodes[id];
    if (!n.alive()) {
      continue;
    }
    n.role = role;
    auto it = clustering.membership.find(id);
    n.cluster_ids = it == clustering.membership.end() ? std::set<ClusterId>{} : it->second;
  }
}

void charge_control_energy(World& world, const ControlTraffic& traffic) {
  for (const auto& [id, count] : traffic.tx) {
    consume(world.nodes[id], world.energy, Activity::TxMessage, static_cast<double>(count));
  }
  for (const auto& [id, count] : traffic.rx) {
    consume(world.nodes[id], world.energy, Activity::RxMessage, static_cast<double>(count));
  }
}

Clustering run_clustering_round(World& world, const CtcpParams& params, Seconds now) {
  const auto participants = world.participants();
  if (participants.empty()) {
    throw NetworkExhausted();
  }
  for (NodeId id : participants) {
    Node& n = world.nodes[id];
    n.cluster_ids.clear();
    n.role = estimated_lifetime(n, world.energy) > params.min_lifetime ? Role::Ordinary : Role::Asleep;
  }
  const RadioGraph graph = build_radio_graph(world.nodes, world.range, [](const Node& n) {
    return in_scope(n, NodeScope::Participants) && n.role != Role::Asleep;
  });
  const Lifetimes lifetimes = full_power_lifetimes(world);

  HeadElection phase1 = elect_potential_heads(graph, lifetimes);
  const HeadElection cover = complete_head_cover(graph, lifetimes, phase1.heads);
  phase1.heads.insert(cover.heads.begin(), cover.heads.end());
  phase1.stats += cover.stats;

  GatewayClassification phase2 = classify_gateways(graph, phase1.heads, lifetimes, params);
  Clustering c = finalize_clusters(graph, phase1.heads, std::move(phase2.statuses), lifetimes, params);
  c.stats += phase1.stats;
  c.stats += phase2.stats;

  for (NodeId v : graph.vertices()) {
    add_broadcast(c.traffic, graph, v);  // discovery
  }
  for (NodeId h : phase1.heads) {
    add_broadcast(c.traffic, graph, h);  // potential-head announce
    add_broadcast(c.traffic, graph, h);  // head announce
  }
  for (const auto& s : c.statuses) {
    ++c.traffic.tx[s.gateway];
    ++c.traffic.rx[s.head];
  }

  if (params.bridge_search_enabled) {
    for (std::size_t i = 0; i < c.statuses.size(); ++i) {
      const GatewayStatus s = c.statuses[i];
      Cluster* cl = c.cluster(s.head);
      if (s.strength != Strength::Weak || cl == nullptr || !cl->gateways.contains(s.gateway)) {
        continue;
      }
      ++c.traffic.tx[s.gateway];
      const BridgeOutcome found =
          bridge_search(s, c, graph, world.nodes, lifetimes, world.energy, params, c.stats);
      if (!found.bridge) {
        continue;
      }
      const NodeId b = *found.bridge;
      cl->bridges.insert(b);
      cl->governing_lifetime[s.gateway] = found.reduced_lifetime;
      protect(*cl, b, lifetimes[b]);
      if (c.roles[b] == Role::Asleep) {
        c.roles[b] = Role::Bridge;
      }
      c.links.push_back({s.gateway, b, params.bridge_power_fraction * world.range});
      c.links.push_back({b, cl->head, world.range});
      if (found.strong) {
        c.statuses[i].strength = Strength::Strong;
      }
    }
  }

  if (params.attach_endpoints) {
    attach_endpoints(world, graph, c, lifetimes);
  }

  for (auto& cl : c.clusters) {
    update_interval(cl, params);
    cl.next_recluster_at = now + cl.ri;
  }

  apply_roles(world, c);
  charge_control_energy(world, c.traffic);
  return c;
}

}  // namespace ctcpsim
