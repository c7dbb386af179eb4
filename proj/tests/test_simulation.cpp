#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctcpsim/errors.hpp"
#include "ctcpsim/simulation.hpp"
#include "oracles.hpp"

using namespace ctcpsim;

namespace {

Scenario short_scenario(Protocol p, Seconds duration = 120) {
  Scenario s;
  s.protocol = p;
  s.duration = duration;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("zero duration gives only the t=0 sample") {
  for (Protocol p : {Protocol::Ctcp, Protocol::Cec, Protocol::Gaf}) {
    const auto r = run(short_scenario(p, 0));
    REQUIRE(r.log.samples.size() == 1);
    CHECK(r.log.samples[0].time == 0.0);
    CHECK(r.log.samples[0].alive == 50);
    CHECK(r.summary.packets_emitted == 0);
  }
}

TEST_CASE("same scenario and seed give identical output") {
  for (Protocol p : {Protocol::Ctcp, Protocol::Cec, Protocol::Gaf}) {
    const auto a = run(short_scenario(p));
    const auto b = run(short_scenario(p));
    CHECK(timeseries_csv(a.log) == timeseries_csv(b.log));
    CHECK(packets_csv(a.log) == packets_csv(b.log));
    CHECK(summary_json(a.summary) == summary_json(b.summary));
  }
  Scenario other = short_scenario(Protocol::Ctcp);
  other.seed = 2;
  CHECK(timeseries_csv(run(other).log) != timeseries_csv(run(short_scenario(Protocol::Ctcp)).log));
}

TEST_CASE("packets are conserved and samples are consistent") {
  for (Protocol p : {Protocol::Ctcp, Protocol::Cec, Protocol::Gaf}) {
    const auto r = run(short_scenario(p, 200));
    for (const auto& pk : r.log.packets) {
      REQUIRE(pk.resolved());
      REQUIRE(pk.delivered_at.has_value() != pk.drop_reason.has_value());
      if (pk.delivered_at) REQUIRE(pk.holder() == pk.dst);
    }
    CHECK(r.summary.packets_emitted == 5 * 4 * 200);
    CHECK(r.summary.packets_delivered + r.summary.packets_dropped == r.summary.packets_emitted);
    REQUIRE(r.log.samples.size() == 201);
    for (std::size_t i = 1; i < r.log.samples.size(); ++i) {
      REQUIRE(r.log.samples[i].time > r.log.samples[i - 1].time);
      REQUIRE(r.log.samples[i].alive <= r.log.samples[i - 1].alive);
      REQUIRE(r.log.samples[i].energy <= r.log.samples[i - 1].energy);
    }
    // The last sample agrees with a direct count over the final node states.
    std::size_t alive = 0;
    double energy = 0;
    for (const auto& n : r.final_world.nodes) {
      if (n.infinite_energy) continue;
      alive += n.energy > 0;
      energy += n.energy;
    }
    CHECK(r.log.samples.back().alive == alive);
    CHECK(r.log.samples.back().energy == doctest::Approx(energy));
    CHECK(r.summary.final_alive == alive);
  }
}

TEST_CASE("hops follow radio links on a static network") {
  Scenario s = short_scenario(Protocol::Ctcp, 100);
  s.mobility.pause_time = 1000;  // nobody leaves the first waypoint
  const auto r = run(s);
  const auto& nodes = r.final_world.nodes;
  std::size_t delivered = 0;
  for (const auto& pk : r.log.packets) {
    for (std::size_t i = 1; i < pk.hops.size(); ++i) {
      REQUIRE(oracle::dist(nodes[pk.hops[i - 1]].position, nodes[pk.hops[i]].position) <= s.range);
    }
    for (std::size_t i = 1; i + 1 < pk.hops.size(); ++i) REQUIRE_FALSE(nodes[pk.hops[i]].infinite_energy);
    delivered += pk.delivered_at.has_value();
  }
  CHECK(delivered > 0);
}

TEST_CASE("per-hop latency") {
  Scenario s = short_scenario(Protocol::Ctcp, 20);
  const auto r = run(s);
  const double hop = 512 * 8 / 2e6 + 0.002;
  for (const auto& pk : r.log.packets) {
    if (pk.delivered_at) {
      REQUIRE(*pk.delivered_at - pk.emitted_at == doctest::Approx(hop * (pk.hops.size() - 1)));
    }
  }
}

TEST_CASE("CTCP rounds keep gateways alive past the interval") {
  std::size_t rounds = 0;
  const auto r = run(short_scenario(Protocol::Ctcp, 300), [&](Seconds, const Clustering& c, const World&) {
    ++rounds;
    for (const auto& cl : c.clusters) {
      for (NodeId g : cl.gateways) REQUIRE(cl.governing_lifetime.at(g) > cl.ri);
    }
  });
  CHECK(rounds == r.summary.clustering_rounds);
  CHECK(r.summary.lifetime_violations == 0);
}

TEST_CASE("CTCP keeps more nodes alive than GAF on the default scenario") {
  Scenario s;
  s.protocol = Protocol::Ctcp;
  const auto ctcp = run(s);
  s.protocol = Protocol::Gaf;
  const auto gaf = run(s);
  CHECK(ctcp.summary.final_alive > gaf.summary.final_alive);
}

TEST_CASE("sweeps") {
  const Scenario base = short_scenario(Protocol::Ctcp, 30);
  const auto pauses = sweep(base, "pause_time", {"0", "250", "500", "1000"}, 2);
  REQUIRE(pauses.size() == 4);
  CHECK(pauses[2].value == "500");
  CHECK(sweep(base, "alpha", {}, 4).empty());

  std::vector<std::string> seeds;
  for (int i = 1; i <= 10; ++i) seeds.push_back(std::to_string(i));
  const auto serial = sweep(base, "seed", seeds, 1);
  const auto parallel = sweep(base, "seed", seeds, 4);
  REQUIRE(serial.size() == 10);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].summary.seed == i + 1);
    CHECK(summary_json(serial[i].summary) == summary_json(parallel[i].summary));
  }
  CHECK_THROWS_AS(sweep(base, "bogus", {"1"}), ValidationError);
  CHECK_THROWS_AS(sweep(base, "protocol", {"gaf"}), ValidationError);
  CHECK_THROWS_AS(sweep(base, "alpha", {"2"}), ValidationError);
  CHECK_THROWS_AS(sweep(base, "seed", {"1", "1"}), ValidationError);

  const auto doc = nlohmann::json::parse(sweep_json("seed", serial));
  CHECK(doc["results"].size() == 10);
  CHECK(doc["aggregate"]["final_alive"]["n"] == 10);
  CHECK(doc["aggregate"].contains("mean_delay"));
}

TEST_CASE("output files and schema") {
  const auto dir = std::filesystem::temp_directory_path() / "ctcpsim_sim_outputs";
  std::filesystem::remove_all(dir);
  const auto r = run(short_scenario(Protocol::Cec, 30));
  write_outputs(r, dir);
  const auto ts = slurp(dir / "timeseries.csv");
  std::istringstream lines(ts);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "time,alive,energy,awake");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    REQUIRE(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 31);

  std::istringstream pk(slurp(dir / "packets.csv"));
  std::getline(pk, line);
  CHECK(line == "id,flow,src,dst,emitted_at,delivered_at,delay,hops,status");
  while (std::getline(pk, line)) REQUIRE(std::count(line.begin(), line.end(), ',') == 8);

  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"final_alive", "mean_residual_energy", "mean_delay", "partition_events",
                          "clustering_rounds", "control_messages"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["protocol"] == "cec");
  std::filesystem::remove_all(dir);
}
