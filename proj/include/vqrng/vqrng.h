#ifndef VQRNG_H
#define VQRNG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define VQRNG_API __attribute__((visibility("default")))
#else
#define VQRNG_API
#endif

typedef enum vqrng_status {
  VQRNG_OK = 0,
  VQRNG_INVALID_ARGUMENT = 1,
  VQRNG_INTEGRATION_DIVERGED = 2,
  VQRNG_FILTER_DESIGN = 3,
  VQRNG_DEGENERATE_FRAME = 4,
  VQRNG_NO_EXTRACTABLE_ENTROPY = 5,
  VQRNG_INSUFFICIENT_SEED = 6,
  VQRNG_LENGTH_MISMATCH = 7,
  VQRNG_IO = 8,
  VQRNG_PARSE = 9,
  VQRNG_OUT_OF_MEMORY = 98,
  VQRNG_INTERNAL = 99
} vqrng_status;

/* Message of the last failure on the calling thread; "" after a success. */
VQRNG_API const char* vqrng_last_error(void);
/* Stage that failed last on the calling thread, "" if the failure was not
   tagged with a stage. */
VQRNG_API const char* vqrng_last_error_stage(void);
VQRNG_API const char* vqrng_status_name(vqrng_status status);
VQRNG_API const char* vqrng_version(void);

/* Strings returned through char** are owned by the caller. */
VQRNG_API void vqrng_string_free(char* s);

/* ---- configuration ---- */

typedef struct vqrng_config vqrng_config;

VQRNG_API vqrng_status vqrng_config_default(vqrng_config** out);
VQRNG_API vqrng_status vqrng_config_load(const char* path, vqrng_config** out);
VQRNG_API vqrng_status vqrng_config_parse(const char* json, vqrng_config** out);
VQRNG_API vqrng_status vqrng_config_save(const vqrng_config* config, const char* path);
VQRNG_API vqrng_status vqrng_config_to_json(const vqrng_config* config, char** out);
/* Dotted key, JSON value: ("laser.gamma_a", "0.3"), ("digitizer.mode", "\"comparator\""). */
VQRNG_API vqrng_status vqrng_config_set(vqrng_config* config, const char* key, const char* json_value);
/* JSON text of the value at a dotted key. */
VQRNG_API vqrng_status vqrng_config_get(const vqrng_config* config, const char* key, char** json_value);
/* Same as vqrng_config_set, with `value` taken as a plain string. */
VQRNG_API vqrng_status vqrng_config_set_string(vqrng_config* config, const char* key, const char* value);
VQRNG_API vqrng_status vqrng_config_validate(const vqrng_config* config);
/* 64 hex digits plus terminator. */
VQRNG_API vqrng_status vqrng_config_hash(const vqrng_config* config, char out[65]);
VQRNG_API void vqrng_config_free(vqrng_config* config);

/* ---- bit sequences ---- */

typedef struct vqrng_bits vqrng_bits;

/* One byte per bit; nonzero is 1. */
VQRNG_API vqrng_status vqrng_bits_from_array(const uint8_t* bits, size_t count, vqrng_bits** out);
VQRNG_API vqrng_status vqrng_bits_read(const char* path, vqrng_bits** out);
VQRNG_API vqrng_status vqrng_bits_write(const vqrng_bits* bits, const char* path);
VQRNG_API size_t vqrng_bits_size(const vqrng_bits* bits);
/* Copies min(size, capacity) bits as 0/1 bytes. */
VQRNG_API vqrng_status vqrng_bits_copy(const vqrng_bits* bits, uint8_t* out, size_t capacity);
VQRNG_API void vqrng_bits_free(vqrng_bits* bits);

/* ---- entropy and extraction primitives ---- */

VQRNG_API vqrng_status vqrng_min_entropy(const vqrng_bits* bits, double* out);
VQRNG_API vqrng_status vqrng_window_probability(const double* sx, size_t count, double sigma, double c, double* out);
VQRNG_API vqrng_status vqrng_reduction_factor(double h_min, double p_window, double* out);
VQRNG_API vqrng_status vqrng_von_neumann(const vqrng_bits* raw, vqrng_bits** out);
/* `seed` holds m + n - 1 bits, `raw` holds n bits. */
VQRNG_API vqrng_status vqrng_toeplitz_extract(size_t m, size_t n, const vqrng_bits* seed, const vqrng_bits* raw,
                                              vqrng_bits** out);

/* ---- statistical suite ---- */

typedef struct vqrng_suite vqrng_suite;

typedef struct vqrng_suite_row {
  const char* name; /* valid while the suite lives */
  size_t sequences;
  size_t passes;
  size_t errors;
  double pass_proportion;
  double proportion_threshold;
  double p_value;      /* single-sequence runs; NaN otherwise or on error */
  double uniformity_p; /* NaN when fewer than 10 sequences */
} vqrng_suite_row;

/* Runs the suite on `bits` split into sequences of `sequence_bits`
   (0: one sequence) with the tests enabled in `config`. */
VQRNG_API vqrng_status vqrng_suite_run(const vqrng_config* config, const vqrng_bits* bits, size_t sequence_bits,
                                       vqrng_suite** out);
VQRNG_API size_t vqrng_suite_row_count(const vqrng_suite* suite);
VQRNG_API vqrng_status vqrng_suite_get_row(const vqrng_suite* suite, size_t index, vqrng_suite_row* out);
VQRNG_API int vqrng_suite_all_passed(const vqrng_suite* suite);
VQRNG_API void vqrng_suite_free(vqrng_suite* suite);

/* ---- stages (artifacts go to the config's output_dir) ---- */

typedef struct vqrng_run_options {
  unsigned threads;    /* 0: all cores */
  size_t trace_frames; /* also write trace.csv for this many frames */
} vqrng_run_options;

typedef struct vqrng_entropy_summary {
  double h_min;
  double p_window;
  double gamma_tilde;
  uint64_t n_bits;
  uint64_t n_ones;
} vqrng_entropy_summary;

typedef struct vqrng_extraction_summary {
  uint64_t n;
  uint64_t m;
  uint64_t blocks;
  uint64_t seed_bits;
  uint64_t seed_raw_bits;
  uint64_t output_bits;
} vqrng_extraction_summary;

/* Output pointers may be NULL. `options` may be NULL for defaults. */
VQRNG_API vqrng_status vqrng_stage_simulate(const vqrng_config* config, const vqrng_run_options* options,
                                            uint64_t* frames);
VQRNG_API vqrng_status vqrng_stage_digitize(const vqrng_config* config, uint64_t* raw_bits, uint64_t* degenerate);
VQRNG_API vqrng_status vqrng_stage_entropy(const vqrng_config* config, vqrng_entropy_summary* out);
VQRNG_API vqrng_status vqrng_stage_extract(const vqrng_config* config, vqrng_extraction_summary* out);
VQRNG_API vqrng_status vqrng_stage_test(const vqrng_config* config, vqrng_suite** out);

typedef struct vqrng_pipeline_summary {
  uint64_t frames;
  uint64_t degenerate;
  uint64_t raw_bits;
  vqrng_entropy_summary entropy;
  vqrng_extraction_summary extraction;
  char config_sha256[65];
} vqrng_pipeline_summary;

VQRNG_API vqrng_status vqrng_run_pipeline(const vqrng_config* config, const vqrng_run_options* options,
                                          vqrng_pipeline_summary* summary, vqrng_suite** suite);

/* ---- rate and noise sweeps ---- */

/* S_x histograms per rate. `central_mass` (nullable) receives n_rates values. */
VQRNG_API vqrng_status vqrng_fig2a(const vqrng_config* config, const double* rates, size_t n_rates,
                                   const vqrng_run_options* options, double* central_mass);
/* Reduction factor table. `gamma` (nullable) receives n_rates * n_sigmas
   values, rate-major, NaN where no entropy is extractable. */
VQRNG_API vqrng_status vqrng_fig2b(const vqrng_config* config, const double* sigmas, size_t n_sigmas,
                                   const double* rates, size_t n_rates, const vqrng_run_options* options,
                                   double* gamma);

#ifdef __cplusplus
}
#endif

#endif
