#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctcpsim/ctcp.hpp"
#include "ctcpsim/metrics.hpp"
#include "ctcpsim/scenario.hpp"
#include "ctcpsim/traffic.hpp"
#include "ctcpsim/world.hpp"

namespace ctcpsim {

struct RunSummary {
  std::string protocol;
  std::uint64_t seed = 0;
  Seconds duration = 0.0;
  std::size_t node_count = 0;
  std::size_t final_alive = 0;
  Joules initial_energy_total = 0.0;
  Joules final_residual_energy = 0.0;
  Joules mean_residual_energy = 0.0;  // per routing node at the end
  std::optional<Seconds> mean_delay;
  std::size_t packets_emitted = 0;
  std::size_t packets_delivered = 0;
  std::size_t packets_dropped = 0;
  std::size_t partition_events = 0;
  std::size_t partitioned_samples = 0;
  std::size_t clustering_rounds = 0;
  std::uint64_t control_messages = 0;
  std::size_t lifetime_violations = 0;  // gateways whose governing lifetime did not exceed RI
  std::optional<Seconds> first_death;
};

struct RunResult {
  Scenario scenario;
  MetricsLog log;
  RunSummary summary;
  World final_world;
};

// Called after every clustering round (CTCP and CEC) with the round time.
using RoundObserver = std::function<void(Seconds, const Clustering&, const World&)>;

RunResult run(const Scenario& scenario, const RoundObserver& observer = {});

// Initial placement used by `run`, exposed for inspection.
World build_world(const Scenario& scenario);

std::string timeseries_csv(const MetricsLog& log);
std::string packets_csv(const MetricsLog& log);
std::string summary_json(const RunSummary& summary);

// Writes timeseries.csv, packets.csv and summary.json into `dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

struct SweepEntry {
  std::string value;
  RunSummary summary;
};

// One run per value of `param` over a shared base scenario. Runs go to up to
// `jobs` worker threads; the result order always follows `values`.
std::vector<SweepEntry> sweep(const Scenario& base, const std::string& param,
                              const std::vector<std::string>& values, unsigned jobs = 1);

// Per-value summaries plus mean and sample standard deviation of the main
// metrics across entries.
std::string sweep_json(const std::string& param, const std::vector<SweepEntry>& entries);

}  // namespace ctcpsim
