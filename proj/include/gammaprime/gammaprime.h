/*
 * gammaprime C API.
 *
 * Every fallible call returns a gp_status; on failure the message is
 * available from gp_last_error() on the calling thread. Handles are opaque
 * and owned by the caller, who releases them with the matching *_destroy.
 */
#ifndef GAMMAPRIME_H
#define GAMMAPRIME_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GP_BUILDING_LIBRARY)
#    define GP_API __declspec(dllexport)
#  else
#    define GP_API __declspec(dllimport)
#  endif
#else
#  define GP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gp_status {
  GP_OK = 0,
  GP_ERR_DOMAIN = 1,
  GP_ERR_DEGENERATE_TABLE = 2,
  GP_ERR_ALREADY_CORRECTED = 3,
  GP_ERR_OUT_OF_RANGE = 4,
  GP_ERR_BRACKET = 5,
  GP_ERR_CONVERGENCE = 6,
  GP_ERR_UNDERFLOW = 7,
  GP_ERR_PARSE = 8,
  GP_ERR_INVALID_ARGUMENT = 9,
  GP_ERR_IO = 10,
  GP_ERR_NULL_POINTER = 11,
  GP_ERR_INTERNAL = 12
} gp_status;

GP_API const char* gp_status_string(gp_status status);
/* Message of the last failure on this thread; empty after a success. */
GP_API const char* gp_last_error(void);
GP_API const char* gp_version(void);

/* Receives non-fatal warnings (e.g. |log OR| beyond the monotone range). */
typedef void (*gp_warning_fn)(const char* message, void* user_data);
GP_API void gp_set_warning_handler(gp_warning_fn handler, void* user_data);

/* ---- constants and scalar transforms ---------------------------------- */

typedef struct gp_constants {
  double psi_star;   /* root of psi tanh(psi) = 1 */
  double max_log_or; /* 4 psi_star */
  double llc;        /* Laplace Limit Constant */
  double max_or;     /* exp(max_log_or) */
} gp_constants;

GP_API gp_status gp_get_constants(gp_constants* out);
GP_API gp_status gp_gamma(double log_or, double* out);
GP_API gp_status gp_gamma_prime(double log_or, double* out);
GP_API gp_status gp_se_gamma_prime(double log_or, double se_log_or, double* out);
GP_API gp_status gp_yule(double odds_ratio, double* yule_y, double* yule_q);
GP_API gp_status gp_zt_ratio(double log_or, double* out);
/* Standard normal quantile. */
GP_API gp_status gp_normal_quantile(double p, double* out);

/* ---- 2x2 tables ------------------------------------------------------- */

typedef struct gp_table gp_table;

/* Rows: cases, controls. Columns: exposed, unexposed. */
GP_API gp_status gp_table_create(double n11, double n12, double n21, double n22,
                                 gp_table** out);
/* Haldane-Anscombe correction into a new table. */
GP_API gp_status gp_table_haldane(const gp_table* table, gp_table** out);
GP_API gp_status gp_table_cells(const gp_table* table, double cells[4], int* corrected);
GP_API void gp_table_destroy(gp_table* table);

/* Undefined quantities are NaN. */
typedef struct gp_analysis {
  double log_or;
  double se_log_or;
  double gamma;
  double gamma_prime;
  double se_gamma_prime;
  double yule_y;
  double yule_q;
  double z;
  double p_z;
  double t;
  double p_t;
  double n_total;
} gp_analysis;

GP_API gp_status gp_table_analyze(const gp_table* table, gp_analysis* out);

/* ---- priors and posteriors -------------------------------------------- */

typedef enum gp_scale { GP_SCALE_LOG_OR = 0, GP_SCALE_GAMMA_PRIME = 1 } gp_scale;
typedef enum gp_sided { GP_ONE_SIDED = 0, GP_TWO_SIDED = 1 } gp_sided;

typedef struct gp_prior gp_prior;

GP_API gp_status gp_prior_default(double pi0, double tau, double truncation, int bins,
                                  gp_prior** out);
GP_API gp_status gp_prior_from_csv(const char* text, gp_prior** out);
GP_API gp_status gp_prior_load(const char* path, gp_prior** out);
GP_API gp_status gp_prior_size(const gp_prior* prior, size_t* out);
GP_API void gp_prior_destroy(gp_prior* prior);

typedef struct gp_posterior gp_posterior;

typedef struct gp_posterior_summary {
  double mean;
  double hpd_low;
  double hpd_high;
  double credibility;
  double observed_statistic;
  double se_used;
} gp_posterior_summary;

/* observed is the test statistic log(OR)/se. */
GP_API gp_status gp_posterior_compute(const gp_prior* prior, double observed, double se,
                                      gp_sided sided, gp_scale scale, double credibility,
                                      gp_posterior** out);
GP_API gp_status gp_posterior_summary_get(const gp_posterior* posterior,
                                          gp_posterior_summary* out);
GP_API gp_status gp_posterior_size(const gp_posterior* posterior, size_t* out);
GP_API gp_status gp_posterior_support(const gp_posterior* posterior, size_t index,
                                      double* support, double* weight);
GP_API void gp_posterior_destroy(gp_posterior* posterior);

/* SE of log(OR) from a published OR and confidence interval. */
GP_API gp_status gp_summary_to_se(double or_point, double ci_low, double ci_high,
                                  double level, double* se);

/* Bundled dietary summaries, CSV text: label,or,ci_low,ci_high,ci_level. */
GP_API const char* gp_dietary_csv(void);

/* ---- simulation studies ----------------------------------------------- */

typedef enum gp_study {
  GP_STUDY_TYPE1 = 0,
  GP_STUDY_POWER = 1,
  GP_STUDY_SELECTION = 2
} gp_study;

typedef enum gp_format { GP_FORMAT_TEXT = 0, GP_FORMAT_CSV = 1, GP_FORMAT_JSON = 2 } gp_format;

typedef struct gp_sim_config gp_sim_config;
typedef struct gp_report gp_report;

GP_API gp_status gp_sim_config_create(gp_study kind, gp_sim_config** out);
GP_API gp_status gp_sim_config_add_n_cases(gp_sim_config* config, int64_t n_cases);
GP_API gp_status gp_sim_config_set_replicates(gp_sim_config* config, int64_t replicates);
GP_API gp_status gp_sim_config_set_seed(gp_sim_config* config, uint64_t seed);
GP_API gp_status gp_sim_config_set_alpha(gp_sim_config* config, double alpha);
GP_API gp_status gp_sim_config_set_n_tests(gp_sim_config* config, int64_t n_tests);
GP_API gp_status gp_sim_config_set_scale(gp_sim_config* config, gp_scale scale);
GP_API gp_status gp_sim_config_set_credibility(gp_sim_config* config, double credibility);
/* 0 means hardware concurrency; GAMMAPRIME_THREADS caps it. */
GP_API gp_status gp_sim_config_set_threads(gp_sim_config* config, unsigned threads);
GP_API gp_status gp_sim_config_add_fixed_effect(gp_sim_config* config, double log_or);
GP_API gp_status gp_sim_config_add_normal_effect(gp_sim_config* config, double tau);
GP_API gp_status gp_sim_config_add_mixture_effect(gp_sim_config* config, double pi0,
                                                  double tau, double truncation, int bins);
GP_API gp_status gp_sim_config_validate(const gp_sim_config* config);
GP_API void gp_sim_config_destroy(gp_sim_config* config);

/* log(2) / z_0.95, the default prior spread of log(OR). */
GP_API double gp_default_tau(void);

GP_API gp_status gp_simulate(const gp_sim_config* config, gp_report** out);

typedef struct gp_report_row {
  const char* effect; /* owned by the report */
  int64_t n_cases;
  int64_t n_tests;
  int64_t replicates;
  double rejection_rate_z;
  double rejection_rate_t;
  double mc_se_z;
  double mc_se_t;
  int64_t t_excluded;
  double true_mean_gamma_prime;
  double posterior_mean_gamma_prime;
  double frequentist_mean_gamma_prime;
  double hpd_coverage;
  double mc_se_true;
  double mc_se_posterior;
  double mc_se_frequentist;
  double mc_se_coverage;
} gp_report_row;

GP_API gp_status gp_report_size(const gp_report* report, size_t* out);
GP_API gp_status gp_report_row_get(const gp_report* report, size_t index, gp_report_row* out);
/* *out is a NUL-terminated string released with gp_free_string. */
GP_API gp_status gp_report_render(const gp_report* report, gp_format format, char** out);
GP_API void gp_report_destroy(gp_report* report);

GP_API void gp_free_string(char* text);

#ifdef __cplusplus
}
#endif

#endif /* GAMMAPRIME_H */
