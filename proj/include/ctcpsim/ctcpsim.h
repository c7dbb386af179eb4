/* C interface to the simulator. Every call returns a status code; on failure
 * ctcpsim_last_error() describes the problem (per thread). Objects are opaque
 * and released with their matching _free function. Strings handed out stay
 * valid until the owning object is freed. */
#ifndef CTCPSIM_H
#define CTCPSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(CTCPSIM_BUILDING_LIBRARY)
#define CTCPSIM_API __attribute__((visibility("default")))
#else
#define CTCPSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctcpsim_status {
  CTCPSIM_OK = 0,
  CTCPSIM_INVALID_ARGUMENT = 1,
  CTCPSIM_PARSE_ERROR = 2,
  CTCPSIM_VALIDATION_ERROR = 3,
  CTCPSIM_IO_ERROR = 4,
  CTCPSIM_RUNTIME_ERROR = 5
} ctcpsim_status;

typedef struct ctcpsim_scenario ctcpsim_scenario;
typedef struct ctcpsim_result ctcpsim_result;
typedef struct ctcpsim_sweep_result ctcpsim_sweep_result;

CTCPSIM_API const char* ctcpsim_version(void);
CTCPSIM_API const char* ctcpsim_last_error(void);
CTCPSIM_API const char* ctcpsim_status_name(ctcpsim_status status);

/* Scenarios. A new scenario holds every documented default. */
CTCPSIM_API ctcpsim_status ctcpsim_scenario_new(ctcpsim_scenario** out);
CTCPSIM_API ctcpsim_status ctcpsim_scenario_load(const char* path, ctcpsim_scenario** out);
CTCPSIM_API ctcpsim_status ctcpsim_scenario_parse(const char* text, ctcpsim_scenario** out);
/* Sets one key using the file syntax, e.g. ("alpha", "0.4") or ("flow", "0 5 4 0 1000"). */
CTCPSIM_API ctcpsim_status ctcpsim_scenario_set(ctcpsim_scenario* scenario, const char* key,
                                                const char* value);
CTCPSIM_API ctcpsim_status ctcpsim_scenario_validate(const ctcpsim_scenario* scenario);
/* Writes the scenario in file syntax; *text is owned by the scenario. */
CTCPSIM_API ctcpsim_status ctcpsim_scenario_serialize(ctcpsim_scenario* scenario, const char** text);
CTCPSIM_API void ctcpsim_scenario_free(ctcpsim_scenario* scenario);

/* Single runs. */
CTCPSIM_API ctcpsim_status ctcpsim_run(const ctcpsim_scenario* scenario, ctcpsim_result** out);
CTCPSIM_API ctcpsim_status ctcpsim_result_summary_json(ctcpsim_result* result, const char** json);
CTCPSIM_API ctcpsim_status ctcpsim_result_timeseries_csv(ctcpsim_result* result, const char** csv);
/* Numeric summary field by name (e.g. "final_alive"); absent values give NaN. */
CTCPSIM_API ctcpsim_status ctcpsim_result_metric(const ctcpsim_result* result, const char* name,
                                                 double* value);
/* Creates `dir` if needed and writes timeseries.csv, packets.csv, summary.json. */
CTCPSIM_API ctcpsim_status ctcpsim_result_write(const ctcpsim_result* result, const char* dir);
CTCPSIM_API void ctcpsim_result_free(ctcpsim_result* result);

/* Sweeps: one run per value of a numeric key, on up to `jobs` threads. */
CTCPSIM_API ctcpsim_status ctcpsim_sweep(const ctcpsim_scenario* scenario, const char* param,
                                         const char* const* values, size_t value_count,
                                         unsigned jobs, ctcpsim_sweep_result** out);
CTCPSIM_API ctcpsim_status ctcpsim_sweep_json(ctcpsim_sweep_result* sweep, const char** json);
/* Writes sweep.json and one summary per value under <dir>/<param>=<value>/. */
CTCPSIM_API ctcpsim_status ctcpsim_sweep_write(const ctcpsim_sweep_result* sweep, const char* dir);
CTCPSIM_API void ctcpsim_sweep_free(ctcpsim_sweep_result* sweep);

#ifdef __cplusplus
}
#endif

#endif
