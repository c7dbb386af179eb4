// Command-line front end. Talks to the simulator only through the C API.
#include <cstdio>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ctcpsim/ctcpsim.h"

namespace {

struct Failure {
  int code;
};

void check(ctcpsim_status status, const std::string& context) {
  if (status != CTCPSIM_OK) {
    std::fprintf(stderr, "ctcpsim: %s: %s: %s\n", context.c_str(), ctcpsim_status_name(status),
                 ctcpsim_last_error());
    throw Failure{static_cast<int>(status)};
  }
}

using ScenarioPtr = std::unique_ptr<ctcpsim_scenario, decltype(&ctcpsim_scenario_free)>;

ScenarioPtr load(const std::string& path, const std::string& seed, const std::string& protocol) {
  ctcpsim_scenario* raw = nullptr;
  check(ctcpsim_scenario_load(path.c_str(), &raw), path);
  ScenarioPtr s(raw, ctcpsim_scenario_free);
  if (!seed.empty()) {
    check(ctcpsim_scenario_set(s.get(), "seed", seed.c_str()), "--seed");
  }
  if (!protocol.empty()) {
    check(ctcpsim_scenario_set(s.get(), "protocol", protocol.c_str()), "--protocol");
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for clustering-based topology control in sensor networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ctcpsim_version()));

  std::string scenario_path;
  std::string seed;
  std::string protocol;
  std::string out_dir;
  std::string param;
  std::string values;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario file (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Override the scenario seed");
    cmd->add_option("--protocol", protocol, "Override the protocol")
        ->check(CLI::IsMember({"ctcp", "cec", "gaf"}));
    cmd->add_option("--out", out_dir, "Output directory");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  add_common(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one simulation per parameter value");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--param", param, "Numeric scenario key to vary")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioPtr scenario = load(scenario_path, seed, protocol);
    if (run_cmd->parsed()) {
      ctcpsim_result* raw = nullptr;
      check(ctcpsim_run(scenario.get(), &raw), "run");
      std::unique_ptr<ctcpsim_result, decltype(&ctcpsim_result_free)> result(raw, ctcpsim_result_free);
      if (!out_dir.empty()) {
        check(ctcpsim_result_write(result.get(), out_dir.c_str()), out_dir);
      }
      const char* json = nullptr;
      check(ctcpsim_result_summary_json(result.get(), &json), "summary");
      std::fputs(json, stdout);
    } else {
      const auto list = split_csv(values);
      std::vector<const char*> ptrs;
      for (const auto& v : list) ptrs.push_back(v.c_str());
      ctcpsim_sweep_result* raw = nullptr;
      check(ctcpsim_sweep(scenario.get(), param.c_str(), ptrs.data(), ptrs.size(), jobs, &raw), "sweep");
      std::unique_ptr<ctcpsim_sweep_result, decltype(&ctcpsim_sweep_free)> result(raw, ctcpsim_sweep_free);
      if (!out_dir.empty()) {
        check(ctcpsim_sweep_write(result.get(), out_dir.c_str()), out_dir);
      }
      const char* json = nullptr;
      check(ctcpsim_sweep_json(result.get(), &json), "sweep summary");
      std::fputs(json, stdout);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
