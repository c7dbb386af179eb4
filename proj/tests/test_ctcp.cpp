#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "ctcpsim/baselines.hpp"
#include "ctcpsim/ctcp.hpp"
#include "ctcpsim/errors.hpp"
#include "oracles.hpp"

using namespace ctcpsim;

namespace {

World make_world(const std::vector<Vec2>& pts, const std::vector<double>& energy, double range) {
  World w;
  w.nodes = oracle::make_nodes(pts, energy);
  w.range = range;
  return w;
}

RadioGraph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return RadioGraph::from_edges(n, edges);
}

struct Instance {
  std::vector<Vec2> pts;
  std::vector<double> energy;
  double range = 250.0;
};

Instance random_instance(Rng& rng, std::size_t lo, std::size_t hi) {
  Instance in;
  const std::size_t n = lo + rng.next_u64() % (hi - lo + 1);
  in.pts = oracle::connected_points(rng, n, in.range);
  for (std::size_t i = 0; i < n; ++i) {
    // Coarse values so lifetime ties occur.
    in.energy.push_back(std::round(rng.uniform(20.0, 500.0) / 10.0) * 10.0);
  }
  return in;
}

}  // namespace

TEST_CASE("params validation cites the alpha range") {
  CtcpParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 1.5;
  try {
    p.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("0 < alpha < 1") != std::string::npos);
  }
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("phase 1 election") {
  const RadioGraph chain = path_graph(3);
  auto r = elect_potential_heads(chain, {10, 20, 15});
  CHECK(r.heads == std::set<NodeId>{1});
  CHECK(r.stats.discovery == 4);
  CHECK(r.stats.potential_head_announce == 2);

  RadioGraph single(1, 1.0);
  single.add_vertex(0);
  CHECK(elect_potential_heads(single, {5}).heads == std::set<NodeId>{0});

  const RadioGraph pair = RadioGraph::from_edges(3, std::vector<std::pair<NodeId, NodeId>>{{1, 2}});
  CHECK(elect_potential_heads(pair, {0, 7, 7}).heads == std::set<NodeId>{0, 1});

  const RadioGraph empty;
  auto e = elect_potential_heads(empty, {});
  CHECK(e.heads.empty());
  CHECK(e.stats.total() == 0);
}

TEST_CASE("head cover fills gaps left by local maxima") {
  // 0-1-2-3 with lifetimes rising to the middle-right: only 2 is a local max,
  // which leaves 0 uncovered.
  const RadioGraph g = path_graph(4);
  const Lifetimes life{1, 5, 9, 3};
  auto p1 = elect_potential_heads(g, life);
  CHECK(p1.heads == std::set<NodeId>{2});
  auto cover = complete_head_cover(g, life, p1.heads);
  CHECK(cover.heads == std::set<NodeId>{0});
  CHECK(cover.stats.potential_head_announce == 1);
}

TEST_CASE("strength classification") {
  CHECK(classify_strength(60, 100, 0.5) == Strength::Strong);
  CHECK(classify_strength(40, 100, 0.5) == Strength::Weak);
  CHECK(classify_strength(50, 100, 0.5) == Strength::Weak);
}

TEST_CASE("phase 2 gives one status per (gateway, head) and may differ per head") {
  // heads 0 and 2, gateway 1 between them; 1 is strong toward 0 only.
  const RadioGraph g = path_graph(3);
  const Lifetimes life{100, 60, 200};
  auto r = classify_gateways(g, {0, 2}, life, CtcpParams{});
  REQUIRE(r.statuses.size() == 2);
  CHECK(r.statuses[0] == GatewayStatus{1, 0, Strength::Strong, GatewayKind::Primary});
  CHECK(r.statuses[1] == GatewayStatus{1, 2, Strength::Weak, GatewayKind::Primary});
  CHECK(r.stats.gateway_notify == 2);
}

TEST_CASE("phase 2 secondary gateways") {
  // 0(head) - 1 - 2 - 3(head): 1 and 2 each see the far head through the other.
  const RadioGraph g = path_graph(4);
  auto r = classify_gateways(g, {0, 3}, {100, 50, 50, 100}, CtcpParams{});
  REQUIRE(r.statuses.size() == 2);
  CHECK(r.statuses[0].gateway == 1);
  CHECK(r.statuses[0].head == 3);
  CHECK(r.statuses[0].kind == GatewayKind::Secondary);
  CHECK(r.statuses[1].gateway == 2);
  CHECK(r.statuses[1].head == 0);
}

TEST_CASE("phase 3 intervals") {
  CtcpParams params;
  SUBCASE("all strong") {
    const RadioGraph g = path_graph(3);
    const Lifetimes life{100, 60, 120};
    auto st = classify_gateways(g, {0, 2}, life, params);
    auto c = finalize_clusters(g, {0, 2}, st.statuses, life, params);
    CHECK(c.cluster(0)->ri == doctest::Approx(50.0));
    CHECK(c.cluster(0)->effective_alpha == doctest::Approx(0.5));
    CHECK(c.phases_run == 3);
  }
  SUBCASE("one weak gateway of lifetime 40") {
    const RadioGraph g = path_graph(3);
    const Lifetimes life{100, 40, 120};
    auto st = classify_gateways(g, {0, 2}, life, params);
    auto c = finalize_clusters(g, {0, 2}, st.statuses, life, params);
    const Cluster& cl = *c.cluster(0);
    CHECK(cl.effective_alpha == doctest::Approx(0.36));
    CHECK(cl.ri == doctest::Approx(36.0));
    CHECK(cl.ri < 40.0);
    CHECK(c.roles.at(1) == Role::Gateway);
  }
  SUBCASE("single cluster: no gateways, everyone else asleep") {
    const RadioGraph g = RadioGraph::from_edges(4, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {0, 3}});
    const Lifetimes life{100, 10, 20, 30};
    auto c = finalize_clusters(g, {0}, {}, life, params);
    CHECK(c.cluster(0)->ri == doctest::Approx(50.0));
    for (NodeId v : {1u, 2u, 3u}) CHECK(c.roles.at(v) == Role::Asleep);
    CHECK(c.cluster(0)->members == std::set<NodeId>{1, 2, 3});
  }
}

TEST_CASE("phase 3 keeps one primary gateway per head pair") {
  // heads 0 and 3; 1 and 2 both touch both heads; 2 lives longer.
  const RadioGraph g = RadioGraph::from_edges(
      4, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {3, 1}, {3, 2}});
  const Lifetimes life{100, 60, 70, 100};
  auto st = classify_gateways(g, {0, 3}, life, CtcpParams{});
  auto c = finalize_clusters(g, {0, 3}, st.statuses, life, CtcpParams{});
  CHECK(c.roles.at(2) == Role::Gateway);
  CHECK(c.roles.at(1) == Role::Asleep);
}

namespace {

// H(0) at the origin, weak gateway G(1) toward a second head H2(2), bridge
// candidates B(3) and B'(4) in H's cluster at reduced reach of G.
World bridge_world(bool with_twin) {
  std::vector<Vec2> pts{{0, 0}, {200, 0}, {400, 0}, {100, 50}, {100, -50}};
  std::vector<double> energy{500, 190, 400, 300, with_twin ? 300.0 : 0.0};
  World w = make_world(pts, energy, 250.0);
  if (!with_twin) w.nodes[4].role = Role::Dead;
  return w;
}

}  // namespace

TEST_CASE("bridge search") {
  CtcpParams params;
  SUBCASE("qualifying in-cluster neighbour at reduced reach") {
    World w = bridge_world(false);
    const auto c = run_clustering_round(w, params, 0.0);
    const Cluster& h = *c.cluster(0);
    CHECK(h.bridges == std::set<NodeId>{3});
    CHECK(w.nodes[3].role == Role::Bridge);
    const double reduced = 190.0 / (1.0 + 0.5 * 0.4);
    CHECK(h.governing_lifetime.at(1) == doctest::Approx(reduced));
    CHECK(h.ri == doctest::Approx(0.9 * reduced));
    CHECK(c.stats.bridge_search == 2);  // one probe per weak status
    CHECK(c.cluster(2)->bridges.empty());
  }
  SUBCASE("ties go to the lower id") {
    World w = bridge_world(true);
    const RadioGraph g = build_radio_graph(w.nodes, w.range, NodeScope::Participants);
    const Lifetimes life = full_power_lifetimes(w);
    const auto c = finalize_clusters(g, {0, 2}, classify_gateways(g, {0, 2}, life, params).statuses, life, params);
    MessageStats stats;
    const auto found = bridge_search({1, 0, Strength::Weak, GatewayKind::Primary}, c, g, w.nodes, life,
                                     w.energy, params, stats);
    REQUIRE(found.bridge);
    CHECK(*found.bridge == 3);
    CHECK_FALSE(found.strong);
    CHECK(stats.bridge_search == 1);
  }
  SUBCASE("no in-cluster neighbour within reduced reach") {
    World w = bridge_world(false);
    w.nodes[3].position = {20, 100};  // still in H's cluster, 206 m from G
    const RadioGraph g = build_radio_graph(w.nodes, w.range, NodeScope::Participants);
    const Lifetimes life = full_power_lifetimes(w);
    const auto c = finalize_clusters(g, {0, 2}, classify_gateways(g, {0, 2}, life, params).statuses, life, params);
    MessageStats stats;
    const auto found = bridge_search({1, 0, Strength::Weak, GatewayKind::Primary}, c, g, w.nodes, life,
                                     w.energy, params, stats);
    CHECK_FALSE(found.bridge);
  }
}

TEST_CASE("run_clustering_round small cases") {
  CtcpParams params;
  SUBCASE("triangle") {
    World w = make_world({{0, 0}, {1, 0}, {0, 1}}, {10, 30, 20}, 5.0);
    auto c = run_clustering_round(w, params, 0.0);
    REQUIRE(c.clusters.size() == 1);
    CHECK(c.clusters[0].head == 1);
    CHECK(w.nodes[0].role == Role::Asleep);
    CHECK(w.nodes[2].role == Role::Asleep);
  }
  SUBCASE("two cliques sharing a node") {
    World w = make_world({{0, 0}, {1, 0}, {0, 1}, {6, 0}, {12, 0}, {13, 0}, {12, 1}},
                         {500, 100, 100, 200, 450, 100, 100}, 10.0);
    auto c = run_clustering_round(w, params, 0.0);
    CHECK(c.heads() == std::set<NodeId>{0, 4});
    CHECK(w.nodes[3].role == Role::Gateway);
    CHECK(w.nodes[3].cluster_ids == std::set<ClusterId>{0, 4});
  }
  SUBCASE("one node") {
    World w = make_world({{0, 0}}, {140}, 10.0);
    auto c = run_clustering_round(w, params, 7.0);
    REQUIRE(c.clusters.size() == 1);
    CHECK(w.nodes[0].role == Role::ClusterHead);
    CHECK(c.clusters[0].ri == doctest::Approx(0.5 * 100.0));
    CHECK(c.clusters[0].next_recluster_at == doctest::Approx(57.0));
  }
  SUBCASE("no participant left") {
    World w = make_world({{0, 0}}, {0}, 10.0);
    w.nodes[0].role = Role::Dead;
    CHECK_THROWS_AS(run_clustering_round(w, params, 0.0), NetworkExhausted);
  }
  SUBCASE("control messages are charged") {
    World w = make_world({{0, 0}, {1, 0}, {0, 1}}, {10, 30, 20}, 5.0);
    run_clustering_round(w, params, 0.0);
    CHECK(w.nodes[1].energy < 30.0);
    CHECK(w.nodes[0].energy < 10.0);
  }
}

TEST_CASE("property: lemma invariants on random connected unit-disk graphs") {
  Rng rng(2024);
  CtcpParams params;
  for (int trial = 0; trial < 300; ++trial) {
    Instance in = random_instance(rng, 5, 40);
    World w = make_world(in.pts, in.energy, in.range);
    const auto adj = oracle::unit_disk(in.pts, in.range);
    std::vector<double> life;
    for (double e : in.energy) life.push_back(e / w.energy.p_tx);
    const auto expected_heads = oracle::heads(adj, life);

    params.bridge_search_enabled = trial % 2 == 0;
    const Clustering c = run_clustering_round(w, params, 0.0);
    const std::size_t n = in.pts.size();

    REQUIRE(c.phases_run == 3);
    REQUIRE(c.heads() == expected_heads);

    // Lemma 1.
    for (const auto& node : w.nodes) {
      REQUIRE(node.role != Role::PotentialClusterHead);
      REQUIRE(node.role != Role::Dead);
    }

    // Lemma 3.
    std::uint64_t sum_deg = 0, head_deg = 0;
    for (std::size_t v = 0; v < n; ++v) sum_deg += oracle::degree(adj, v);
    for (NodeId h : expected_heads) head_deg += oracle::degree(adj, h);
    const std::uint64_t notices = oracle::gateway_notices(adj, expected_heads);
    REQUIRE(c.stats.discovery == sum_deg);
    REQUIRE(c.stats.potential_head_announce == head_deg);
    REQUIRE(c.stats.gateway_notify == notices);
    REQUIRE(c.stats.head_announce == head_deg);

    // Lemma 4 and the interval formula.
    for (const auto& cl : c.clusters) {
      REQUIRE(cl.ri == doctest::Approx(cl.effective_alpha * cl.head_lifetime));
      REQUIRE(cl.effective_alpha <= params.alpha);
      for (NodeId g : cl.gateways) REQUIRE(cl.governing_lifetime.at(g) > cl.ri);
      for (NodeId m : cl.members) REQUIRE(adj[cl.head][m]);
    }

    // Roles, memberships and the gateway bound.
    for (const auto& node : w.nodes) {
      if (node.role == Role::Gateway) {
        REQUIRE(node.cluster_ids.size() >= 2);
        REQUIRE(node.cluster_ids.size() <= oracle::degree(adj, node.id));
      }
      if (node.role == Role::Ordinary) REQUIRE(node.cluster_ids.size() <= 1);
      const bool is_head = expected_heads.contains(node.id);
      REQUIRE((node.role == Role::ClusterHead) == is_head);
    }

    // Backbone reachability: awake routing nodes connect every head.
    std::vector<char> awake(n);
    for (std::size_t v = 0; v < n; ++v) awake[v] = w.nodes[v].awake();
    oracle::Matrix backbone = adj;
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t u = 0; u < n; ++u) backbone[v][u] = adj[v][u] && awake[v] && awake[u];
    const auto d = oracle::floyd_warshall(backbone);
    const NodeId h0 = *expected_heads.begin();
    for (NodeId h : expected_heads) REQUIRE(d[h0][h] < oracle::kInf);
  }
}

TEST_CASE("message total on complete graphs grows as n^2") {
  std::vector<double> xs, ys;
  for (std::size_t n : {5u, 10u, 20u, 40u}) {
    World w;
    w.range = 10.0;
    for (std::size_t i = 0; i < n; ++i) {
      Node node;
      node.id = static_cast<NodeId>(i);
      node.position = {std::cos(i * 0.3), std::sin(i * 0.3)};
      node.energy = 100.0 + static_cast<double>(i);
      w.nodes.push_back(node);
    }
    const auto c = run_clustering_round(w, CtcpParams{}, 0.0);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(static_cast<double>(c.stats.total())));
    CHECK(c.stats.discovery == n * (n - 1));
  }
  const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("a weak gateway shortens the CTCP interval while CEC keeps its period") {
  CtcpParams params;
  params.bridge_search_enabled = false;
  const RadioGraph g = path_graph(3);
  const Lifetimes life{100, 30, 120};
  auto ctcp = finalize_clusters(g, {0, 2}, classify_gateways(g, {0, 2}, life, params).statuses, life, params);
  const Seconds period = params.alpha * 100;
  auto cec = cec_cluster_round(g, life, period);
  CHECK(ctcp.cluster(0)->next_recluster_at < cec.cluster(0)->next_recluster_at);
  CHECK(ctcp.cluster(0)->next_recluster_at < 30.0);
  CHECK(cec.cluster(0)->next_recluster_at == doctest::Approx(period));
}

TEST_CASE("endpoints get an awake access node") {
  // Head 0, member 1 asleep; source 2 only reaches member 1.
  World w = make_world({{0, 0}, {8, 0}, {16, 0}}, {100, 50, 0}, 10.0);
  w.nodes[2].infinite_energy = true;
  auto c = run_clustering_round(w, CtcpParams{}, 0.0);
  CHECK(w.nodes[1].role == Role::Ordinary);
  CHECK(c.cluster(0)->access == std::set<NodeId>{1});
  CtcpParams off;
  off.attach_endpoints = false;
  World w2 = make_world({{0, 0}, {8, 0}, {16, 0}}, {100, 50, 0}, 10.0);
  w2.nodes[2].infinite_energy = true;
  run_clustering_round(w2, off, 0.0);
  CHECK(w2.nodes[1].role == Role::Asleep);
}

TEST_CASE("nodes about to die sit the round out") {
  World w = make_world({{0, 0}, {1, 0}}, {100, 0.5}, 10.0);
  auto c = run_clustering_round(w, CtcpParams{}, 0.0);
  CHECK(c.heads() == std::set<NodeId>{0});
  CHECK(w.nodes[1].role == Role::Asleep);
  CHECK_FALSE(c.roles.contains(1));
}
