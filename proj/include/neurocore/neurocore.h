/*
 * neurocore C API.
 *
 * Opaque handles own C++ objects; every handle returned through an out
 * parameter must be released with the matching *_free function. Functions
 * return NC_OK or an error code; nc_last_error() describes the most recent
 * failure on the calling thread. Strings returned through char** are
 * allocated by the library and released with nc_string_free.
 */
#ifndef NEUROCORE_NEUROCORE_H
#define NEUROCORE_NEUROCORE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef NEUROCORE_BUILDING
#    define NC_API __declspec(dllexport)
#  else
#    define NC_API __declspec(dllimport)
#  endif
#else
#  define NC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nc_status {
  NC_OK = 0,
  NC_ERR_INVALID_ARGUMENT = 1,
  NC_ERR_PARSE = 2,
  NC_ERR_CONFIG = 3,
  NC_ERR_IO = 4,
  NC_ERR_NUMERIC = 5,
  NC_ERR_INSUFFICIENT_SPIKES = 6,
  NC_ERR_DEGENERATE_REFERENCE = 7,
  NC_ERR_UNKNOWN_FIELD = 8,
  NC_ERR_INTERNAL = 9
} nc_status;

typedef enum nc_backend { NC_BACKEND_FIXED = 0, NC_BACKEND_FLOAT = 1 } nc_backend;

typedef struct nc_config nc_config;
typedef struct nc_network nc_network;
typedef struct nc_record nc_record;
typedef struct nc_gonogo nc_gonogo;

NC_API const char* nc_last_error(void);
NC_API const char* nc_status_name(nc_status status);
NC_API void nc_string_free(char* s);

/* Configuration */
NC_API nc_status nc_config_default(nc_config** out);
NC_API nc_status nc_config_load(const char* path, nc_config** out);
NC_API nc_status nc_config_parse(const char* text, nc_config** out);
NC_API void nc_config_free(nc_config* cfg);
NC_API nc_status nc_config_set_seed(nc_config* cfg, uint64_t seed);
NC_API nc_status nc_config_set_backend(nc_config* cfg, nc_backend backend);
NC_API nc_status nc_config_set_duration_ms(nc_config* cfg, double duration_ms);
NC_API nc_status nc_config_set_threads(nc_config* cfg, int threads);
NC_API nc_status nc_config_get_seed(const nc_config* cfg, uint64_t* seed);
NC_API nc_status nc_config_get_duration_ms(const nc_config* cfg, double* ms);

/* Basal ganglia network */
NC_API nc_status nc_network_build_bg(const nc_config* cfg, nc_network** out);
NC_API void nc_network_free(nc_network* net);
NC_API nc_status nc_network_set_dopamine(nc_network* net, double delta_dop);
NC_API nc_status nc_network_synapse_count(const nc_network* net, size_t* count);
NC_API nc_status nc_network_population_count(const nc_network* net, size_t* count);
/* Advances one step; *spikes receives the number of spikes emitted. */
NC_API nc_status nc_network_step(nc_network* net, size_t* spikes);
NC_API nc_status nc_network_run(nc_network* net, int64_t steps, nc_record** out);

/* Spike records */
NC_API void nc_record_free(nc_record* rec);
NC_API nc_status nc_record_size(const nc_record* rec, size_t* count);
/* population receives a pointer owned by the record. */
NC_API nc_status nc_record_event(const nc_record* rec, size_t index,
                                 int64_t* step, const char** population,
                                 uint32_t* neuron);
NC_API nc_status nc_record_export(const nc_record* rec, const char* csv_path,
                                  const char* svg_path, double duration_ms);

/* Go/No-Go experiment: baseline, high and low dopamine. */
NC_API nc_status nc_gonogo_run(const nc_config* cfg, nc_gonogo** out);
NC_API void nc_gonogo_free(nc_gonogo* result);
/* condition: "baseline", "high" or "low". */
NC_API nc_status nc_gonogo_rate(const nc_gonogo* result, const char* condition,
                                const char* population, double* mean_rate_hz,
                                size_t* spike_count);
NC_API nc_status nc_gonogo_summary_json(const nc_gonogo* result, char** json);
NC_API nc_status nc_gonogo_write(const nc_gonogo* result, const char* out_dir);

/* Single-neuron experiments */
/* Writes one voltage-trace CSV per regime and backend into out_dir (NULL:
 * no files) and returns the detection report. *all_passed is 1 when every
 * regime was detected on both backends. */
NC_API nc_status nc_regimes_run(const char* out_dir, char** report,
                                int* all_passed);
NC_API nc_status nc_errt_report(char** report, double* rs_percent,
                                double* fs_percent);
NC_API nc_status nc_errt(const double* reference_ms, size_t reference_len,
                         const double* test_ms, size_t test_len,
                         double* percent);

/* Microcode block schedules */
NC_API nc_status nc_schedule_canonical_text(char** text);
/* text NULL: validates the shipped schedule. *report lists one violation per
 * line; *violations receives their count. */
NC_API nc_status nc_schedule_validate(const char* text, char** report,
                                      size_t* violations);

#ifdef __cplusplus
}
#endif

#endif /* NEUROCORE_NEUROCORE_H */
