#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ctcpsim/baselines.hpp"
#include "oracles.hpp"

using namespace ctcpsim;

TEST_CASE("GAF cell geometry") {
  CHECK(gaf_cell_size(5.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(gaf_cell_of({0, 0}, gaf_cell_size(5.0)) == GafGrid::Cell{0, 0});
  CHECK(gaf_cell_of({2.3, 0}, gaf_cell_size(5.0)) == GafGrid::Cell{1, 0});
  CHECK(gaf_assign_cells({}, 5.0).cells.empty());
  CHECK_THROWS(gaf_assign_cells({}, 0.0));
}

TEST_CASE("GAF leader rotation") {
  std::vector<Node> nodes(4);
  for (NodeId i = 0; i < 4; ++i) {
    nodes[i].id = i;
    nodes[i].position = {0.1 * i, 0.1};
  }
  nodes[3].position = {50, 50};  // alone in its cell
  nodes[0].energy = 10;
  nodes[1].energy = 30;
  nodes[2].energy = 30;
  nodes[3].energy = 1;
  auto grid = gaf_assign_cells(nodes, 5.0);
  gaf_rotate_leaders(grid, nodes);
  CHECK(grid.leader.at({0, 0}) == 1);  // max energy, lower id on the tie with 2
  CHECK(nodes[1].role == Role::Ordinary);
  CHECK(nodes[0].role == Role::Asleep);
  CHECK(nodes[2].role == Role::Asleep);
  CHECK(nodes[3].role == Role::Ordinary);

  nodes[1].energy = 5;
  gaf_rotate_leaders(grid, nodes);
  CHECK(grid.leader.at({0, 0}) == 2);
  CHECK(nodes[1].role == Role::Asleep);
}

TEST_CASE("property: one awake node per non-empty cell") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 60;
    std::vector<double> energy;
    for (std::size_t i = 0; i < n; ++i) energy.push_back(std::floor(rng.uniform(1, 5)));
    auto nodes = oracle::make_nodes(oracle::random_points(rng, n, 1500, 300), energy);
    auto grid = gaf_assign_cells(nodes, 250.0);
    gaf_rotate_leaders(grid, nodes);
    for (const auto& [cell, ids] : grid.cells) {
      std::size_t awake = 0;
      for (NodeId id : ids) awake += nodes[id].awake();
      REQUIRE(awake == 1);
    }
  }
}

TEST_CASE("CEC election and gateways") {
  SUBCASE("chain") {
    const RadioGraph g = RadioGraph::from_edges(3, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}});
    auto c = cec_cluster_round(g, {10, 20, 15}, 50.0);
    CHECK(c.heads() == std::set<NodeId>{1});
    CHECK(c.roles.at(0) == Role::Asleep);
    CHECK(c.roles.at(2) == Role::Asleep);
    CHECK(c.statuses.empty());
  }
  SUBCASE("two candidate gateways for one pair") {
    const RadioGraph g = RadioGraph::from_edges(
        4, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {0, 2}, {3, 1}, {3, 2}});
    auto c = cec_cluster_round(g, {100, 30, 50, 90}, 50.0, 10.0);
    CHECK(c.roles.at(2) == Role::Gateway);
    CHECK(c.roles.at(1) == Role::Asleep);
    CHECK(c.cluster(0)->next_recluster_at == doctest::Approx(60.0));
    CHECK(c.cluster(3)->ri == doctest::Approx(50.0));
  }
}

TEST_CASE("property: CEC heads outlive their neighbours and are never adjacent") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 40;
    const auto pts = oracle::connected_points(rng, n, 250.0);
    const auto adj = oracle::unit_disk(pts, 250.0);
    Lifetimes life;
    for (std::size_t i = 0; i < n; ++i) life.push_back(std::floor(rng.uniform(1, 20)));
    const auto nodes = oracle::make_nodes(pts, std::vector<double>(n, 1.0));
    const RadioGraph g = build_radio_graph(nodes, 250.0);
    const auto c = cec_cluster_round(g, life, 10.0);
    const auto heads = c.heads();
    for (NodeId h : heads) {
      for (NodeId u : heads) REQUIRE_FALSE(adj[h][u]);
    }
    // Local maxima of the election order are always heads.
    for (std::size_t v = 0; v < n; ++v) {
      bool local_max = true;
      for (std::size_t u = 0; u < n; ++u) {
        if (adj[v][u] && (life[u] > life[v] || (life[u] == life[v] && u < v))) local_max = false;
      }
      if (local_max) REQUIRE(heads.contains(static_cast<NodeId>(v)));
    }
    // Every node is a head or next to one.
    for (std::size_t v = 0; v < n; ++v) {
      bool covered = heads.contains(static_cast<NodeId>(v));
      for (NodeId h : heads) covered = covered || adj[v][h];
      REQUIRE(covered);
    }
  }
}
