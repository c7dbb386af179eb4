#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctcpsim/ctcp.hpp"
#include "ctcpsim/world.hpp"

namespace ctcpsim {

enum class Protocol { Ctcp, Cec, Gaf };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);  // throws ValidationError

// Flow endpoints index the source/sink population, not global node ids.
struct FlowSpec {
  std::size_t src = 0;
  std::size_t dst = 0;
  double rate = 4.0;
  Seconds start = 0.0;
  Seconds stop = 0.0;

  bool operator==(const FlowSpec&) const = default;
};

struct Scenario {
  Protocol protocol = Protocol::Ctcp;
  std::uint64_t seed = 1;
  Seconds duration = 1000.0;
  Seconds sampling_period = 1.0;
  Seconds mobility_step = 1.0;
  Seconds energy_tick = 1.0;

  std::size_t node_count = 50;         // routing nodes
  std::size_t source_sink_count = 10;  // infinite-energy traffic endpoints
  bool sources_mobile = true;
  double range = 250.0;
  Joules initial_energy = 500.0;

  EnergyModel energy;
  MobilityParams mobility;
  CtcpParams ctcp;
  bool death_watch = true;
  bool link_watch = true;

  Seconds cec_period = 0.0;  // 0: alpha x median initial full-power lifetime
  Seconds gaf_rotation_period = 5.0;

  double packet_size = 512.0;
  Seconds processing_delay = 0.002;
  std::size_t max_hops = 64;
  std::size_t flow_count = 5;  // default flows when none are listed
  double flow_rate = 4.0;
  std::vector<FlowSpec> flows;

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  // Flows actually used by a run: the explicit list, or `flow_count` pairs
  // (i -> i + flow_count) spanning the whole run.
  std::vector<FlowSpec> effective_flows() const;

  Seconds effective_cec_period() const;

  bool operator==(const Scenario&) const = default;
};

// Sets one key from its textual value; the same keys the file format uses.
// Throws ValidationError for unknown keys or malformed values.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);

bool is_sweepable(std::string_view key);

Scenario parse_scenario(std::string_view text);  // throws ParseError / ValidationError
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& scenario);

std::string format_number(double value);

}  // namespace ctcpsim
