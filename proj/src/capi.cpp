#include "ctcpsim/ctcpsim.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <new>
#include <string>
#include <vector>

#include "ctcpsim/errors.hpp"
#include "ctcpsim/scenario.hpp"
#include "ctcpsim/simulation.hpp"

struct ctcpsim_scenario {
  ctcpsim::Scenario value;
  std::string text;
};

struct ctcpsim_result {
  ctcpsim::RunResult value;
  std::string summary;
  std::string timeseries;
};

struct ctcpsim_sweep_result {
  std::string param;
  std::vector<ctcpsim::SweepEntry> entries;
  std::string json;
};

namespace {

thread_local std::string last_error;

ctcpsim_status fail(ctcpsim_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps exceptions escaping `body` onto status codes.
ctcpsim_status guarded(const std::function<void()>& body) {
  try {
    last_error.clear();
    body();
    return CTCPSIM_OK;
  } catch (const ctcpsim::ParseError& e) {
    return fail(CTCPSIM_PARSE_ERROR, e.what());
  } catch (const ctcpsim::ValidationError& e) {
    return fail(CTCPSIM_VALIDATION_ERROR, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CTCPSIM_IO_ERROR, e.what());
  } catch (const ctcpsim::Error& e) {
    const std::string what = e.what();
    const bool io = what.rfind("cannot", 0) == 0 || what.rfind("write failed", 0) == 0;
    return fail(io ? CTCPSIM_IO_ERROR : CTCPSIM_RUNTIME_ERROR, what);
  } catch (const std::bad_alloc&) {
    return fail(CTCPSIM_RUNTIME_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CTCPSIM_RUNTIME_ERROR, e.what());
  } catch (...) {
    return fail(CTCPSIM_RUNTIME_ERROR, "unknown error");
  }
}

#define CTCPSIM_REQUIRE(cond, what) \
  if (!(cond)) return fail(CTCPSIM_INVALID_ARGUMENT, what)

double metric_value(const ctcpsim::RunSummary& s, const std::string& name, bool& found) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::map<std::string, std::function<double()>> table = {
      {"seed", [&] { return static_cast<double>(s.seed); }},
      {"duration", [&] { return s.duration; }},
      {"node_count", [&] { return static_cast<double>(s.node_count); }},
      {"final_alive", [&] { return static_cast<double>(s.final_alive); }},
      {"initial_energy_total", [&] { return s.initial_energy_total; }},
      {"final_residual_energy", [&] { return s.final_residual_energy; }},
      {"mean_residual_energy", [&] { return s.mean_residual_energy; }},
      {"mean_delay", [&] { return s.mean_delay.value_or(nan); }},
      {"packets_emitted", [&] { return static_cast<double>(s.packets_emitted); }},
      {"packets_delivered", [&] { return static_cast<double>(s.packets_delivered); }},
      {"packets_dropped", [&] { return static_cast<double>(s.packets_dropped); }},
      {"partition_events", [&] { return static_cast<double>(s.partition_events); }},
      {"partitioned_samples", [&] { return static_cast<double>(s.partitioned_samples); }},
      {"clustering_rounds", [&] { return static_cast<double>(s.clustering_rounds); }},
      {"control_messages", [&] { return static_cast<double>(s.control_messages); }},
      {"lifetime_violations", [&] { return static_cast<double>(s.lifetime_violations); }},
      {"first_death", [&] { return s.first_death.value_or(nan); }},
  };
  auto it = table.find(name);
  found = it != table.end();
  return found ? it->second() : nan;
}

}  // namespace

extern "C" {

const char* ctcpsim_version(void) { return "0.1.0"; }

const char* ctcpsim_last_error(void) { return last_error.c_str(); }

const char* ctcpsim_status_name(ctcpsim_status status) {
  switch (status) {
    case CTCPSIM_OK: return "ok";
    case CTCPSIM_INVALID_ARGUMENT: return "invalid argument";
    case CTCPSIM_PARSE_ERROR: return "parse error";
    case CTCPSIM_VALIDATION_ERROR: return "validation error";
    case CTCPSIM_IO_ERROR: return "i/o error";
    case CTCPSIM_RUNTIME_ERROR: return "runtime error";
  }
  return "unknown status";
}

ctcpsim_status ctcpsim_scenario_new(ctcpsim_scenario** out) {
  CTCPSIM_REQUIRE(out != nullptr, "out must not be null");
  return guarded([&] { *out = new ctcpsim_scenario{}; });
}

ctcpsim_status ctcpsim_scenario_load(const char* path, ctcpsim_scenario** out) {
  CTCPSIM_REQUIRE(path != nullptr && out != nullptr, "path and out must not be null");
  return guarded([&] { *out = new ctcpsim_scenario{ctcpsim::load_scenario(path), {}}; });
}

ctcpsim_status ctcpsim_scenario_parse(const char* text, ctcpsim_scenario** out) {
  CTCPSIM_REQUIRE(text != nullptr && out != nullptr, "text and out must not be null");
  return guarded([&] { *out = new ctcpsim_scenario{ctcpsim::parse_scenario(text), {}}; });
}

ctcpsim_status ctcpsim_scenario_set(ctcpsim_scenario* scenario, const char* key, const char* value) {
  CTCPSIM_REQUIRE(scenario != nullptr && key != nullptr && value != nullptr,
                  "scenario, key and value must not be null");
  return guarded([&] {
    ctcpsim::Scenario copy = scenario->value;
    ctcpsim::apply_setting(copy, key, value);
    scenario->value = std::move(copy);
  });
}

ctcpsim_status ctcpsim_scenario_validate(const ctcpsim_scenario* scenario) {
  CTCPSIM_REQUIRE(scenario != nullptr, "scenario must not be null");
  return guarded([&] { scenario->value.validate(); });
}

ctcpsim_status ctcpsim_scenario_serialize(ctcpsim_scenario* scenario, const char** text) {
  CTCPSIM_REQUIRE(scenario != nullptr && text != nullptr, "scenario and text must not be null");
  return guarded([&] {
    scenario->text = ctcpsim::serialize_scenario(scenario->value);
    *text = scenario->text.c_str();
  });
}

void ctcpsim_scenario_free(ctcpsim_scenario* scenario) { delete scenario; }

ctcpsim_status ctcpsim_run(const ctcpsim_scenario* scenario, ctcpsim_result** out) {
  CTCPSIM_REQUIRE(scenario != nullptr && out != nullptr, "scenario and out must not be null");
  return guarded([&] { *out = new ctcpsim_result{ctcpsim::run(scenario->value), {}, {}}; });
}

ctcpsim_status ctcpsim_result_summary_json(ctcpsim_result* result, const char** json) {
  CTCPSIM_REQUIRE(result != nullptr && json != nullptr, "result and json must not be null");
  return guarded([&] {
    if (result->summary.empty()) {
      result->summary = ctcpsim::summary_json(result->value.summary);
    }
    *json = result->summary.c_str();
  });
}

ctcpsim_status ctcpsim_result_timeseries_csv(ctcpsim_result* result, const char** csv) {
  CTCPSIM_REQUIRE(result != nullptr && csv != nullptr, "result and csv must not be null");
  return guarded([&] {
    if (result->timeseries.empty()) {
      result->timeseries = ctcpsim::timeseries_csv(result->value.log);
    }
    *csv = result->timeseries.c_str();
  });
}

ctcpsim_status ctcpsim_result_metric(const ctcpsim_result* result, const char* name, double* value) {
  CTCPSIM_REQUIRE(result != nullptr && name != nullptr && value != nullptr,
                  "result, name and value must not be null");
  bool found = false;
  const double v = metric_value(result->value.summary, name, found);
  if (!found) {
    return fail(CTCPSIM_INVALID_ARGUMENT, std::string("unknown metric '") + name + "'");
  }
  *value = v;
  return CTCPSIM_OK;
}

ctcpsim_status ctcpsim_result_write(const ctcpsim_result* result, const char* dir) {
  CTCPSIM_REQUIRE(result != nullptr && dir != nullptr, "result and dir must not be null");
  return guarded([&] { ctcpsim::write_outputs(result->value, dir); });
}

void ctcpsim_result_free(ctcpsim_result* result) { delete result; }

ctcpsim_status ctcpsim_sweep(const ctcpsim_scenario* scenario, const char* param,
                             const char* const* values, size_t value_count, unsigned jobs,
                             ctcpsim_sweep_result** out) {
  CTCPSIM_REQUIRE(scenario != nullptr && param != nullptr && out != nullptr,
                  "scenario, param and out must not be null");
  CTCPSIM_REQUIRE(values != nullptr || value_count == 0, "values must not be null");
  return guarded([&] {
    std::vector<std::string> list;
    for (size_t i = 0; i < value_count; ++i) {
      if (values[i] == nullptr) {
        throw ctcpsim::ValidationError("sweep value must not be null");
      }
      list.emplace_back(values[i]);
    }
    auto entries = ctcpsim::sweep(scenario->value, param, list, jobs);
    *out = new ctcpsim_sweep_result{param, std::move(entries), {}};
  });
}

ctcpsim_status ctcpsim_sweep_json(ctcpsim_sweep_result* sweep, const char** json) {
  CTCPSIM_REQUIRE(sweep != nullptr && json != nullptr, "sweep and json must not be null");
  return guarded([&] {
    if (sweep->json.empty()) {
      sweep->json = ctcpsim::sweep_json(sweep->param, sweep->entries);
    }
    *json = sweep->json.c_str();
  });
}

ctcpsim_status ctcpsim_sweep_write(const ctcpsim_sweep_result* sweep, const char* dir) {
  CTCPSIM_REQUIRE(sweep != nullptr && dir != nullptr, "sweep and dir must not be null");
  return guarded([&] {
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root);
    for (const auto& e : sweep->entries) {
      const auto sub = root / (sweep->param + "=" + e.value);
      std::filesystem::create_directories(sub);
      std::ofstream(sub / "summary.json") << ctcpsim::summary_json(e.summary);
    }
    std::ofstream out(root / "sweep.json");
    out << ctcpsim::sweep_json(sweep->param, sweep->entries);
    if (!out) {
      throw ctcpsim::Error("cannot write sweep.json");
    }
  });
}

void ctcpsim_sweep_free(ctcpsim_sweep_result* sweep) { delete sweep; }

}  // extern "C"
