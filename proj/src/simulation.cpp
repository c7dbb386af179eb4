#include "ctcpsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "ctcpsim/baselines.hpp"
#include "ctcpsim/errors.hpp"
#include "ctcpsim/sim_core.hpp"

namespace ctcpsim {

namespace {

using Json = nlohmann::ordered_json;

World populate(const Scenario& sc, std::vector<Rng>* streams);

class Engine {
 public:
  Engine(const Scenario& scenario, const RoundObserver& observer)
      : sc_(scenario), observer_(observer), world_(populate(scenario, &rngs_)) {
    for (const auto& spec : sc_.effective_flows()) {
      Flow f;
      f.src = static_cast<NodeId>(sc_.node_count + spec.src);
      f.dst = static_cast<NodeId>(sc_.node_count + spec.dst);
      f.rate = spec.rate;
      f.packet_size = sc_.packet_size;
      f.start = spec.start;
      f.stop = std::min(spec.stop, sc_.duration);
      flows_.push_back(f);
    }
    next_emission_.assign(flows_.size(), 0);
    summary_.initial_energy_total = sc_.initial_energy * static_cast<double>(sc_.node_count);
  }

  RunResult run() {
    sched_.schedule(0.0, EventKind::ReclusterTrigger, kRoundAll);
    sched_.schedule(0.0, EventKind::Sample, 0);
    if (sc_.energy_tick <= sc_.duration) {
      sched_.schedule(sc_.energy_tick, EventKind::EnergyTick, 1);
    }
    if (sc_.mobility_step <= sc_.duration) {
      sched_.schedule(sc_.mobility_step, EventKind::MobilityStep, 1);
    }
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      schedule_emission(i);
    }
    const auto handler = [this](const Event& ev) { handle(ev); };
    sched_.run_until(sc_.duration, handler);
    sched_.schedule(sc_.duration, EventKind::SimEnd, 0);
    sched_.run_until(sc_.duration, handler);
    return finish();
  }

 private:
  static constexpr std::uint64_t kRoundAll = ~std::uint64_t{0};

  void handle(const Event& ev) {
    if (ended_) {
      return;
    }
    switch (ev.kind) {
      case EventKind::EnergyTick: on_energy_tick(ev); break;
      case EventKind::MobilityStep: on_mobility(ev); break;
      case EventKind::Sample: on_sample(ev); break;
      case EventKind::ReclusterTrigger: on_trigger(ev); break;
      case EventKind::PacketEmit: on_emit(ev); break;
      case EventKind::PacketHop: on_hop(ev); break;
      case EventKind::SimEnd: on_end(ev); break;
    }
  }

  // Drains every node for the time since the last settlement at the draw of
  // its current state.
  void settle(Seconds now) {
    const Seconds dt = now - settled_at_;
    settled_at_ = now;
    if (!(dt > 0.0)) {
      return;
    }
    for (auto& n : world_.nodes) {
      if (n.alive() && !n.infinite_energy) {
        charge(n, (n.awake() ? world_.energy.p_rx : world_.energy.p_sleep) * dt, now);
      }
    }
  }

  void charge(Node& n, Joules joules, Seconds now) {
    if (!n.alive() || n.infinite_energy) {
      return;
    }
    const bool was_awake = n.awake();
    drain(n, joules);
    if (!n.alive()) {
      ++version_;
      if (!summary_.first_death) {
        summary_.first_death = now;
      }
      if (was_awake) {
        backbone_died_ = true;
      }
    }
  }

  const RadioGraph& awake_graph() {
    if (awake_version_ != version_) {
      awake_ = build_radio_graph(world_.nodes, world_.range, NodeScope::Awake);
      awake_version_ = version_;
    }
    return awake_;
  }

  const RadioGraph& alive_graph() {
    if (alive_version_ != version_) {
      alive_ = build_radio_graph(world_.nodes, world_.range, NodeScope::Alive);
      alive_version_ = version_;
    }
    return alive_;
  }

  RelayFilter relay() const {
    return [this](NodeId v) { return !world_.nodes[v].infinite_energy; };
  }

  // ---- clustering ----------------------------------------------------------

  void recluster(Seconds now) {
    settle(now);
    for (EventHandle h : triggers_) {
      sched_.cancel(h);
    }
    triggers_.clear();
    backbone_died_ = false;
    if (exhausted_) {
      return;
    }
    if (sc_.protocol == Protocol::Gaf) {
      ++version_;
      gaf_round(now);
      return;
    }
    const std::size_t alive_before = world_.participants().size();
    try {
      clustering_ = sc_.protocol == Protocol::Ctcp
                        ? run_clustering_round(world_, sc_.ctcp, now)
                        : run_cec_round(world_, sc_.effective_cec_period(), now);
    } catch (const NetworkExhausted&) {
      exhausted_ = true;
      clustering_.reset();
      return;
    }
    ++version_;
    if (!summary_.first_death && world_.participants().size() < alive_before) {
      summary_.first_death = now;  // control traffic drained someone
    }
    ++summary_.clustering_rounds;
    summary_.control_messages += clustering_->stats.total();
    if (sc_.protocol == Protocol::Ctcp) {
      for (const auto& cl : clustering_->clusters) {
        for (NodeId g : cl.gateways) {
          auto it = cl.governing_lifetime.find(g);
          if (it == cl.governing_lifetime.end() || !(it->second > cl.ri)) {
            ++summary_.lifetime_violations;
          }
        }
      }
    }
    if (sc_.protocol == Protocol::Ctcp) {
      label_fragments();
    }
    if (observer_) {
      observer_(now, *clustering_, world_);
    }
    if (sc_.protocol == Protocol::Ctcp) {
      for (const auto& cl : clustering_->clusters) {
        triggers_.push_back(
            sched_.schedule(std::max(now, cl.next_recluster_at), EventKind::ReclusterTrigger, cl.id));
      }
    } else {
      triggers_.push_back(
          sched_.schedule(now + sc_.effective_cec_period(), EventKind::ReclusterTrigger, kRoundAll));
    }
  }

  void gaf_round(Seconds now) {
    const auto participants = world_.participants();
    if (participants.empty()) {
      exhausted_ = true;
      return;
    }
    gaf_ = gaf_assign_cells(world_.nodes, world_.range, sc_.gaf_rotation_period);
    gaf_rotate_leaders(gaf_, world_.nodes);
    ++summary_.clustering_rounds;
    triggers_.push_back(
        sched_.schedule(now + sc_.gaf_rotation_period, EventKind::ReclusterTrigger, kRoundAll));
  }

  void on_trigger(const Event& ev) { recluster(ev.time); }

  bool ctcp_watching() const {
    return sc_.protocol == Protocol::Ctcp && clustering_.has_value() && !exhausted_;
  }

  void on_energy_tick(const Event& ev) {
    settle(ev.time);
    if (ctcp_watching() && sc_.death_watch && backbone_died_) {
      recluster(ev.time);
    }
    reschedule(EventKind::EnergyTick, ev.subject, sc_.energy_tick);
  }

  void on_mobility(const Event& ev) {
    const Seconds dt = sc_.mobility_step;
    for (auto& n : world_.nodes) {
      if (!n.alive() || (n.infinite_energy && !sc_.sources_mobile)) {
        continue;
      }
      step_mobility(n, world_.mobility, ev.time - dt, dt, rngs_[n.id]);
    }
    ++version_;
    if (ctcp_watching() && sc_.link_watch && links_broken()) {
      recluster(ev.time);
    }
    reschedule(EventKind::MobilityStep, ev.subject, dt);
  }

  // Fragment label of every node that took part in the last round, -1 for
  // the rest.
  void label_fragments() {
    fragment_.assign(world_.nodes.size(), -1);
    const RadioGraph g = build_radio_graph(world_.nodes, world_.range, [this](const Node& n) {
      return n.alive() && clustering_->roles.contains(n.id);
    });
    int next = 0;
    for (NodeId root : g.vertices()) {
      if (fragment_[root] >= 0) {
        continue;
      }
      std::vector<NodeId> stack{root};
      fragment_[root] = next;
      while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId u : g.neighbors(v)) {
          if (fragment_[u] < 0) {
            fragment_[u] = next;
            stack.push_back(u);
          }
        }
      }
      ++next;
    }
  }

  // True when a monitored link stretched beyond its reach or lost an
  // endpoint, two fragments of the last round came into range of each other,
  // or a source/sink came into range of a fragment it has no access node in.
  bool links_broken() const {
    const auto& nodes = world_.nodes;
    for (const auto& link : clustering_->links) {
      const Node& a = nodes[link.a];
      const Node& b = nodes[link.b];
      if (!a.alive() || !b.alive() || distance(a.position, b.position) > link.max_distance) {
        return true;
      }
    }
    const auto in_range = [this](const Node& a, const Node& b) {
      return distance(a.position, b.position) <= world_.range;
    };
    for (const auto& a : nodes) {
      if (!a.alive() || fragment_[a.id] < 0) {
        continue;
      }
      for (const auto& b : nodes) {
        if (b.id > a.id && b.alive() && fragment_[b.id] >= 0 && fragment_[b.id] != fragment_[a.id] &&
            in_range(a, b)) {
          return true;
        }
      }
    }
    if (!sc_.ctcp.attach_endpoints) {
      return false;
    }
    for (const auto& s : nodes) {
      if (!s.infinite_energy || !s.alive()) {
        continue;
      }
      std::set<int> served;
      for (const auto& link : clustering_->links) {
        if (link.a == s.id) {
          served.insert(fragment_[link.b]);
        }
      }
      for (const auto& v : nodes) {
        if (v.alive() && fragment_[v.id] >= 0 && !served.contains(fragment_[v.id]) && in_range(s, v)) {
          return true;
        }
      }
    }
    return false;
  }

  void reschedule(EventKind kind, std::uint64_t k, Seconds period) {
    const Seconds t = static_cast<double>(k + 1) * period;
    if (t <= sc_.duration) {
      sched_.schedule(t, kind, k + 1);
    }
  }

  // ---- metrics -------------------------------------------------------------

  void on_sample(const Event& ev) {
    settle(ev.time);
    log_.samples.push_back(sample(world_, ev.time));
    const auto filter = relay();
    const PartitionCheck check = detect_partitions(awake_graph(), flows_, ev.time, filter, &alive_graph());
    if (check.partitioned) {
      ++log_.partitioned_samples;
      if (!partitioned_) {
        log_.partition_events.push_back({ev.time, check.component_count});
      }
    }
    if (check.component_count > 1) {
      ++log_.split_samples;
    }
    partitioned_ = check.partitioned;
    reschedule(EventKind::Sample, ev.subject, sc_.sampling_period);
  }

  // ---- traffic -------------------------------------------------------------

  void schedule_emission(std::size_t flow) {
    const Flow& f = flows_[flow];
    const Seconds t = f.start + static_cast<double>(next_emission_[flow]) / f.rate;
    if (t < f.stop && t <= sc_.duration && t >= sched_.now()) {
      sched_.schedule(t, EventKind::PacketEmit, flow);
    }
  }

  void on_emit(const Event& ev) {
    const std::size_t fi = ev.subject;
    const Flow& f = flows_[fi];
    Packet p;
    p.id = log_.packets.size();
    p.flow = fi;
    p.src = f.src;
    p.dst = f.dst;
    p.emitted_at = ev.time;
    p.hops.push_back(f.src);
    log_.packets.push_back(std::move(p));
    forward(log_.packets.size() - 1, ev.time);
    ++next_emission_[fi];
    schedule_emission(fi);
  }

  void forward(std::size_t id, Seconds now) {
    Packet& p = log_.packets[id];
    if (p.hops.size() - 1 >= sc_.max_hops) {
      p.drop_reason = DropReason::NoRoute;
      return;
    }
    const RouteDecision decision = route(p, awake_graph(), relay(), &alive_graph());
    if (!decision.path) {
      p.drop_reason = decision.drop;
      return;
    }
    const NodeId from = p.holder();
    const NodeId to = (*decision.path)[1];
    charge(world_.nodes[from], world_.energy.tx_cost(sc_.packet_size), now);
    charge(world_.nodes[to], world_.energy.rx_cost(sc_.packet_size), now);
    in_flight_[id] = to;
    sched_.schedule(now + world_.energy.airtime(sc_.packet_size) + sc_.processing_delay,
                    EventKind::PacketHop, id);
  }

  void on_hop(const Event& ev) {
    const std::size_t id = ev.subject;
    auto it = in_flight_.find(id);
    const NodeId to = it->second;
    in_flight_.erase(it);
    Packet& p = log_.packets[id];
    if (!world_.nodes[to].alive()) {
      p.drop_reason = DropReason::NodeDied;
      return;
    }
    p.hops.push_back(to);
    if (to == p.dst) {
      p.delivered_at = ev.time;
      return;
    }
    forward(id, ev.time);
  }

  void on_end(const Event& ev) {
    settle(ev.time);
    for (const auto& [id, to] : in_flight_) {
      log_.packets[id].drop_reason = DropReason::Expired;
    }
    in_flight_.clear();
    ended_ = true;
  }

  RunResult finish() {
    RunSummary& s = summary_;
    s.protocol = std::string(to_string(sc_.protocol));
    s.seed = sc_.seed;
    s.duration = sc_.duration;
    s.node_count = sc_.node_count;
    const MetricSample last = sample(world_, sc_.duration);
    s.final_alive = last.alive;
    s.final_residual_energy = last.energy;
    s.mean_residual_energy = last.energy / static_cast<double>(sc_.node_count);
    s.mean_delay = average_delay(log_.packets, 0.0, sc_.duration);
    s.packets_emitted = log_.packets.size();
    for (const auto& p : log_.packets) {
      if (p.delivered_at) {
        ++s.packets_delivered;
      } else {
        ++s.packets_dropped;
      }
    }
    s.partition_events = log_.partition_events.size();
    s.partitioned_samples = log_.partitioned_samples;
    return RunResult{sc_, std::move(log_), s, world_};
  }

  Scenario sc_;
  RoundObserver observer_;
  std::vector<Rng> rngs_;  // one mobility stream per node; filled while placing nodes
  World world_;
  std::vector<Flow> flows_;
  std::vector<std::uint64_t> next_emission_;
  Scheduler sched_;
  MetricsLog log_;
  RunSummary summary_;

  std::optional<Clustering> clustering_;
  GafGrid gaf_;
  std::vector<EventHandle> triggers_;
  std::vector<int> fragment_;  // connected piece of the last round's graph, per node
  std::map<std::size_t, NodeId> in_flight_;  // packet id -> receiving node

  Seconds settled_at_ = 0.0;
  std::uint64_t version_ = 1;
  std::uint64_t awake_version_ = 0;
  std::uint64_t alive_version_ = 0;
  RadioGraph awake_;
  RadioGraph alive_;
  bool backbone_died_ = false;
  bool exhausted_ = false;
  bool partitioned_ = false;
  bool ended_ = false;
};

World populate(const Scenario& sc, std::vector<Rng>* streams) {
  sc.validate();
  World w;
  w.energy = sc.energy;
  w.mobility = sc.mobility;
  w.range = sc.range;
  const std::size_t total = sc.node_count + sc.source_sink_count;
  for (std::size_t i = 0; i < total; ++i) {
    Node n;
    n.id = static_cast<NodeId>(i);
    Rng rng = Rng::substream(sc.seed, n.id);
    n.position = {rng.uniform(0.0, sc.mobility.width), rng.uniform(0.0, sc.mobility.height)};
    n.waypoint = {rng.uniform(0.0, sc.mobility.width), rng.uniform(0.0, sc.mobility.height)};
    n.speed = rng.uniform(sc.mobility.speed_min, sc.mobility.speed_max);
    // Random waypoint starts with a pause, so a pause as long as the run
    // keeps the network static.
    n.at_waypoint = true;
    n.pause_until = sc.mobility.pause_time;
    n.infinite_energy = i >= sc.node_count;
    n.energy = n.infinite_energy ? 0.0 : sc.initial_energy;
    w.nodes.push_back(n);
    if (streams != nullptr) {
      streams->push_back(rng);
    }
  }
  return w;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json summary_object(const RunSummary& s) {
  Json j;
  j["protocol"] = s.protocol;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["node_count"] = s.node_count;
  j["final_alive"] = s.final_alive;
  j["initial_energy_total"] = s.initial_energy_total;
  j["final_residual_energy"] = s.final_residual_energy;
  j["mean_residual_energy"] = s.mean_residual_energy;
  j["mean_delay"] = optional_number(s.mean_delay);
  j["packets_emitted"] = s.packets_emitted;
  j["packets_delivered"] = s.packets_delivered;
  j["packets_dropped"] = s.packets_dropped;
  j["delivery_ratio"] =
      s.packets_emitted == 0 ? Json(nullptr)
                             : Json(static_cast<double>(s.packets_delivered) / static_cast<double>(s.packets_emitted));
  j["partition_events"] = s.partition_events;
  j["partitioned_samples"] = s.partitioned_samples;
  j["clustering_rounds"] = s.clustering_rounds;
  j["control_messages"] = s.control_messages;
  j["lifetime_violations"] = s.lifetime_violations;
  j["first_death"] = optional_number(s.first_death);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw Error("write failed for '" + path.string() + "'");
  }
}

}  // namespace

World build_world(const Scenario& sc) { return populate(sc, nullptr); }

RunResult run(const Scenario& scenario, const RoundObserver& observer) {
  scenario.validate();
  Engine engine(scenario, observer);
  return engine.run();
}

std::string timeseries_csv(const MetricsLog& log) {
  std::ostringstream out;
  out << "time,alive,energy,awake\n";
  for (const auto& s : log.samples) {
    out << format_number(s.time) << ',' << s.alive << ',' << format_number(s.energy) << ',' << s.awake
        << '\n';
  }
  return out.str();
}

std::string packets_csv(const MetricsLog& log) {
  std::ostringstream out;
  out << "id,flow,src,dst,emitted_at,delivered_at,delay,hops,status\n";
  for (const auto& p : log.packets) {
    out << p.id << ',' << p.flow << ',' << p.src << ',' << p.dst << ',' << format_number(p.emitted_at) << ',';
    if (p.delivered_at) {
      out << format_number(*p.delivered_at) << ',' << format_number(*p.delivered_at - p.emitted_at);
    } else {
      out << ',';
    }
    out << ',' << (p.hops.size() - 1) << ',';
    if (p.delivered_at) {
      out << "Delivered";
    } else if (p.drop_reason) {
      out << to_string(*p.drop_reason);
    }
    out << '\n';
  }
  return out.str();
}

std::string summary_json(const RunSummary& summary) { return summary_object(summary).dump(2) + "\n"; }

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  write_file(dir / "timeseries.csv", timeseries_csv(result.log));
  write_file(dir / "packets.csv", packets_csv(result.log));
  write_file(dir / "summary.json", summary_json(result.summary));
}

std::vector<SweepEntry> sweep(const Scenario& base, const std::string& param,
                              const std::vector<std::string>& values, unsigned jobs) {
  if (!is_sweepable(param)) {
    throw ValidationError("parameter '" + param + "' is not a sweepable numeric field");
  }
  std::set<std::string> distinct;
  std::vector<Scenario> scenarios;
  for (const auto& v : values) {
    if (!distinct.insert(v).second) {
      throw ValidationError("sweep value '" + v + "' is listed twice");
    }
    Scenario s = base;
    apply_setting(s, param, v);
    s.validate();
    scenarios.push_back(std::move(s));
  }

  std::vector<SweepEntry> out(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        out[i] = {values[i], run(scenarios[i]).summary};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

std::string sweep_json(const std::string& param, const std::vector<SweepEntry>& entries) {
  Json j;
  j["param"] = param;
  Json results = Json::object();
  for (const auto& e : entries) {
    results[e.value] = summary_object(e.summary);
  }
  j["results"] = results;

  const std::vector<std::pair<const char*, double RunSummary::*>> reals = {
      {"final_residual_energy", &RunSummary::final_residual_energy},
      {"mean_residual_energy", &RunSummary::mean_residual_energy},
  };
  auto stats = [](const std::vector<double>& xs) {
    Json s;
    s["n"] = xs.size();
    if (xs.empty()) {
      s["mean"] = nullptr;
      s["stddev"] = nullptr;
      return s;
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    s["mean"] = mean;
    if (xs.size() < 2) {
      s["stddev"] = nullptr;
    } else {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      s["stddev"] = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
  };
  Json agg;
  auto collect = [&](const char* name, auto getter) {
    std::vector<double> xs;
    for (const auto& e : entries) {
      if (auto v = getter(e.summary)) xs.push_back(*v);
    }
    agg[name] = stats(xs);
  };
  using Opt = std::optional<double>;
  collect("final_alive", [](const RunSummary& s) { return Opt(static_cast<double>(s.final_alive)); });
  for (const auto& [name, member] : reals) {
    collect(name, [member = member](const RunSummary& s) { return Opt(s.*member); });
  }
  collect("mean_delay", [](const RunSummary& s) { return s.mean_delay; });
  collect("partition_events",
          [](const RunSummary& s) { return Opt(static_cast<double>(s.partition_events)); });
  collect("clustering_rounds",
          [](const RunSummary& s) { return Opt(static_cast<double>(s.clustering_rounds)); });
  collect("control_messages",
          [](const RunSummary& s) { return Opt(static_cast<double>(s.control_messages)); });
  j["aggregate"] = agg;
  return j.dump(2) + "\n";
}

}  // namespace ctcpsim
