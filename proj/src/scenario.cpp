#include "ctcpsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ctcpsim/errors.hpp"

namespace ctcpsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ValidationError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ValidationError(std::string(key) + ": expected a non-negative integer, got '" +
                          std::string(text) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no") {
    return false;
  }
  throw ValidationError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

FlowSpec to_flow(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto next = text.find_first_of(" \t,", pos);
    const auto token = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!token.empty()) {
      parts.push_back(token);
    }
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  if (parts.size() != 5) {
    throw ValidationError("flow: expected '<src> <dst> <rate> <start> <stop>'");
  }
  FlowSpec f;
  f.src = to_uint("flow src", parts[0]);
  f.dst = to_uint("flow dst", parts[1]);
  f.rate = to_double("flow rate", parts[2]);
  f.start = to_double("flow start", parts[3]);
  f.stop = to_double("flow stop", parts[4]);
  return f;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string_view key;
  bool numeric;
  std::function<void(Scenario&, std::string_view)> set;
  std::function<std::string(const Scenario&)> get;
};

#define CTCPSIM_REAL(name, member)                                                    \
  Field {                                                                             \
    name, true, [](Scenario& s, std::string_view v) { s.member = to_double(name, v); }, \
        [](const Scenario& s) { return format_number(s.member); }                     \
  }
#define CTCPSIM_UINT(name, member)                                                   \
  Field {                                                                            \
    name, true, [](Scenario& s, std::string_view v) { s.member = to_uint(name, v); }, \
        [](const Scenario& s) { return std::to_string(s.member); }                   \
  }
#define CTCPSIM_BOOL(name, member)                                                    \
  Field {                                                                             \
    name, false, [](Scenario& s, std::string_view v) { s.member = to_bool(name, v); }, \
        [](const Scenario& s) { return bool_text(s.member); }                         \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"protocol", false,
            [](Scenario& s, std::string_view v) { s.protocol = parse_protocol(v); },
            [](const Scenario& s) { return std::string(to_string(s.protocol)); }},
      CTCPSIM_UINT("seed", seed),
      CTCPSIM_REAL("duration", duration),
      CTCPSIM_REAL("sampling_period", sampling_period),
      CTCPSIM_REAL("mobility_step", mobility_step),
      CTCPSIM_REAL("energy_tick", energy_tick),
      CTCPSIM_UINT("node_count", node_count),
      CTCPSIM_UINT("source_sink_count", source_sink_count),
      CTCPSIM_BOOL("sources_mobile", sources_mobile),
      CTCPSIM_REAL("area_width", mobility.width),
      CTCPSIM_REAL("area_height", mobility.height),
      CTCPSIM_REAL("range", range),
      CTCPSIM_REAL("initial_energy", initial_energy),
      CTCPSIM_REAL("p_tx", energy.p_tx),
      CTCPSIM_REAL("p_rx", energy.p_rx),
      CTCPSIM_REAL("p_sleep", energy.p_sleep),
      CTCPSIM_REAL("bitrate", energy.bitrate),
      CTCPSIM_REAL("control_message_bytes", energy.control_message_bytes),
      CTCPSIM_REAL("speed_min", mobility.speed_min),
      CTCPSIM_REAL("speed_max", mobility.speed_max),
      CTCPSIM_REAL("pause_time", mobility.pause_time),
      CTCPSIM_REAL("alpha", ctcp.alpha),
      CTCPSIM_REAL("alpha_safety", ctcp.alpha_safety),
      CTCPSIM_BOOL("bridge_search", ctcp.bridge_search_enabled),
      CTCPSIM_REAL("bridge_power_fraction", ctcp.bridge_power_fraction),
      CTCPSIM_BOOL("attach_endpoints", ctcp.attach_endpoints),
      CTCPSIM_REAL("min_lifetime", ctcp.min_lifetime),
      CTCPSIM_BOOL("death_watch", death_watch),
      CTCPSIM_BOOL("link_watch", link_watch),
      CTCPSIM_REAL("cec_period", cec_period),
      CTCPSIM_REAL("gaf_rotation_period", gaf_rotation_period),
      CTCPSIM_REAL("packet_size", packet_size),
      CTCPSIM_REAL("processing_delay", processing_delay),
      CTCPSIM_UINT("max_hops", max_hops),
      CTCPSIM_UINT("flow_count", flow_count),
      CTCPSIM_REAL("flow_rate", flow_rate),
  };
  return table;
}

#undef CTCPSIM_REAL
#undef CTCPSIM_UINT
#undef CTCPSIM_BOOL

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      return &f;
    }
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Ctcp: return "ctcp";
    case Protocol::Cec: return "cec";
    case Protocol::Gaf: return "gaf";
  }
  return "?";
}

Protocol parse_protocol(std::string_view text) {
  if (text == "ctcp") return Protocol::Ctcp;
  if (text == "cec") return Protocol::Cec;
  if (text == "gaf") return Protocol::Gaf;
  throw ValidationError("protocol must be one of ctcp, cec, gaf (got '" + std::string(text) + "')");
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void Scenario::validate() const {
  energy.validate();
  mobility.validate();
  ctcp.validate();
  if (node_count == 0) {
    throw ValidationError("node_count must be >= 1");
  }
  if (!(duration >= 0.0)) {
    throw ValidationError("duration must be >= 0");
  }
  if (!(sampling_period > 0.0 && mobility_step > 0.0 && energy_tick > 0.0)) {
    throw ValidationError("sampling_period, mobility_step and energy_tick must be > 0");
  }
  if (!(range > 0.0)) {
    throw ValidationError("range must be > 0");
  }
  if (!(initial_energy > 0.0)) {
    throw ValidationError("initial_energy must be > 0");
  }
  if (!(cec_period >= 0.0)) {
    throw ValidationError("cec_period must be >= 0 (0 selects the default)");
  }
  if (!(gaf_rotation_period > 0.0)) {
    throw ValidationError("gaf_rotation_period must be > 0");
  }
  if (!(packet_size > 0.0 && processing_delay >= 0.0)) {
    throw ValidationError("packet_size must be > 0 and processing_delay >= 0");
  }
  if (max_hops == 0) {
    throw ValidationError("max_hops must be >= 1");
  }
  if (flows.empty()) {
    if (2 * flow_count > source_sink_count) {
      throw ValidationError("default flows need source_sink_count >= 2 * flow_count");
    }
    if (flow_count > 0 && !(flow_rate > 0.0)) {
      throw ValidationError("flow_rate must be > 0");
    }
  }
  for (const auto& f : flows) {
    if (f.src >= source_sink_count || f.dst >= source_sink_count) {
      throw ValidationError("flow endpoint index out of range of source_sink_count");
    }
    if (f.src == f.dst) {
      throw ValidationError("flow requires src != dst");
    }
    if (!(f.rate > 0.0)) {
      throw ValidationError("flow requires rate > 0");
    }
  }
}

std::vector<FlowSpec> Scenario::effective_flows() const {
  if (!flows.empty()) {
    return flows;
  }
  std::vector<FlowSpec> out;
  for (std::size_t i = 0; i < flow_count; ++i) {
    out.push_back({i, i + flow_count, flow_rate, 0.0, duration});
  }
  return out;
}

Seconds Scenario::effective_cec_period() const {
  if (cec_period > 0.0) {
    return cec_period;
  }
  // Every routing node starts with the same energy, so the median initial
  // lifetime is that node's full-power lifetime.
  return ctcp.alpha * initial_energy / energy.p_tx;
}

void apply_setting(Scenario& scenario, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "flow") {
    scenario.flows.push_back(to_flow(value));
    return;
  }
  const Field* f = find_field(key);
  if (f == nullptr) {
    throw ValidationError("unknown key '" + std::string(key) + "'");
  }
  f->set(scenario, value);
}

bool is_sweepable(std::string_view key) {
  const Field* f = find_field(key);
  return f != nullptr && f->numeric;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(line_no, "missing key");
    }
    if (key != "flow" && !seen.insert(std::string(key)).second) {
      throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
    }
    try {
      apply_setting(s, key, value);
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open scenario file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scenario) {
  std::ostringstream out;
  for (const auto& f : fields()) {
    out << f.key << " = " << f.get(scenario) << '\n';
  }
  for (const auto& flow : scenario.flows) {
    out << "flow = " << flow.src << ' ' << flow.dst << ' ' << format_number(flow.rate) << ' '
        << format_number(flow.start) << ' ' << format_number(flow.stop) << '\n';
  }
  return out.str();
}

}  // namespace ctcpsim
