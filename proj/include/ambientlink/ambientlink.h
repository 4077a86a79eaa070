#ifndef AMBIENTLINK_H
#define AMBIENTLINK_H

#include <stddef.h>
#include <stdint.h>

#if defined(AL_BUILDING_LIBRARY)
#define AL_API __attribute__((visibility("default")))
#else
#define AL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum al_status {
    AL_OK = 0,
    AL_ERR_VALIDATION = 1,
    AL_ERR_REGIME = 2,
    AL_ERR_UNRELIABLE = 3,
    AL_ERR_DOMAIN = 4,
    AL_ERR_IO = 5,
    AL_ERR_ARGUMENT = 6,
    AL_ERR_INTERNAL = 7
} al_status;

typedef struct al_scenario al_scenario;
typedef struct al_record al_record;
typedef struct al_series al_series;
typedef struct al_text al_text;

AL_API const char* al_version(void);

/* Message and numeric payload of the last failure on the calling thread. */
AL_API const char* al_last_error(void);
AL_API double al_last_error_value(void);
/* Process exit code for a status: 0, 1 (validation and others), 2 (regime), 3 (unreliable). */
AL_API int al_exit_code(al_status status);

AL_API const char* al_text_get(const al_text* text);
AL_API void al_text_free(al_text* text);

/* Scenarios */
AL_API al_status al_scenario_load(const char* path, int override_spacing, al_scenario** out);
AL_API al_status al_scenario_parse(const char* json_text, int override_spacing, al_scenario** out);
AL_API void al_scenario_free(al_scenario* scenario);
AL_API al_status al_scenario_set_seed(al_scenario* scenario, uint64_t seed);
AL_API al_status al_scenario_out_dir(const al_scenario* scenario, al_text** out);
AL_API al_status al_scenario_echo(const al_scenario* scenario, al_text** out);
AL_API al_status al_scenario_warnings(const al_scenario* scenario, al_text** out);
AL_API al_status al_scenario_budget(const al_scenario* scenario, double* snr_ratio, double* cond_ratio,
                                    double* implied_rate);

/* Commands write into out_dir and return a human-readable report. workers = 0 uses all cores. */
AL_API al_status al_cmd_verify(const al_scenario* scenario, const char* out_dir, unsigned workers, al_text** report);
AL_API al_status al_cmd_predict(const al_scenario* scenario, const char* out_dir, unsigned workers, al_text** report);
AL_API al_status al_cmd_simulate(const al_scenario* scenario, const char* out_dir, unsigned workers, al_text** report);
AL_API al_status al_cmd_ber(const al_scenario* scenario, const char* out_dir, unsigned workers, al_text** report);
AL_API al_status al_cmd_decode(const al_scenario* scenario, const char* series_csv, const char* out_dir,
                               unsigned workers, al_text** report);

/* Records */
AL_API al_status al_record_simulate(const al_scenario* scenario, uint64_t realization, al_record** out);
AL_API al_status al_record_read(const char* path, al_record** out);
AL_API al_status al_record_write(const al_record* record, const char* path);
AL_API void al_record_free(al_record* record);
AL_API size_t al_record_size(const al_record* record);
AL_API size_t al_record_receivers(const al_record* record);
AL_API double al_record_dt(const al_record* record);
AL_API double al_record_t0(const al_record* record);
AL_API al_status al_record_samples(const al_record* record, size_t receiver, const double** data, size_t* n);

/* ECSD series */
AL_API al_status al_series_from_record(const al_record* record, const al_scenario* scenario, al_series** out);
AL_API al_status al_series_read_csv(const char* path, al_series** out);
AL_API void al_series_free(al_series* series);
AL_API size_t al_series_size(const al_series* series);
AL_API al_status al_series_get(const al_series* series, size_t k, double* t_center, double* re, double* im);
/* Decodes with the scenario's preamble and mode; bits receives al_series_size / 2 values. */
AL_API al_status al_series_decode(const al_series* series, const al_scenario* scenario, int* bits, size_t n_bits,
                                  double* snr);

/* Primitives */
AL_API al_status al_green0(double omega, double c0, const double x[3], const double y[3], double out[2]);
AL_API al_status al_minnaert_rho(double R, double c1, double delta, double c0, double* omega_m, double out[2]);
AL_API al_status al_fresnel(double d, double out[2]);
AL_API al_status al_wilson_interval(size_t errors, size_t n, double out[2]);

#ifdef __cplusplus
}
#endif

#endif
