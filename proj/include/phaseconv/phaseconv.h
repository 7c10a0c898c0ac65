// Copyright 2026 The phaseconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHASECONV_PHASECONV_H
#define PHASECONV_PHASECONV_H

/* C interface to libphaseconv. All objects are opaque handles released with
 * the matching *_free function. Every call returns a pc_status; on failure
 * pc_last_error() holds a message for the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PHASECONV_BUILDING)
#define PC_API __declspec(dllexport)
#else
#define PC_API __declspec(dllimport)
#endif
#else
#define PC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
    PC_OK = 0,
    PC_INVALID_ARGUMENT = 1,
    PC_PRECISION_LOSS = 2,
    PC_SUPPORT_TOO_NARROW = 3,
    PC_GAPPED_SPECTRUM = 4,
    PC_NEGATIVE_OFFSET = 5,
    PC_ZERO_VARIANCE = 6,
    PC_RESOURCE_EXHAUSTED = 7,
    PC_COMBINATORIAL_BLOWUP = 8,
    PC_DIMENSION_MISMATCH = 9,
    PC_NOT_PSD = 10,
    PC_CAP_EXCEEDED = 11,
    PC_VALIDATION = 12,
    PC_IO = 13,
    PC_BUFFER_TOO_SMALL = 14,
    PC_INTERNAL = 15
} pc_status;

typedef struct pc_distribution pc_distribution;
typedef struct pc_number_state pc_number_state;
typedef struct pc_posterior pc_posterior;
typedef struct pc_mixed_target pc_mixed_target;
typedef struct pc_config pc_config;
typedef struct pc_result pc_result;

PC_API const char *pc_version(void);
PC_API const char *pc_status_name(pc_status status);
/* Message of the last failed call on this thread ("" if none). */
PC_API const char *pc_last_error(void);

/* ---- distributions ---- */

PC_API pc_status pc_distribution_new(int64_t offset, const double *probs, size_t count, pc_distribution **out);
PC_API void pc_distribution_free(pc_distribution *dist);
PC_API int64_t pc_distribution_offset(const pc_distribution *dist);
PC_API size_t pc_distribution_size(const pc_distribution *dist);
/* Copies min(capacity, size) probabilities; PC_BUFFER_TOO_SMALL if capacity < size. */
PC_API pc_status pc_distribution_probs(const pc_distribution *dist, double *out, size_t capacity);
PC_API pc_status pc_power_convolve(const pc_distribution *dist, uint64_t copies, pc_distribution **out);
PC_API pc_status pc_moments(const pc_distribution *dist, double *mean, double *variance);
PC_API pc_status pc_l1_distance(const pc_distribution *a, const pc_distribution *b, double *out);
PC_API pc_status pc_char_fn(const pc_distribution *dist, double gamma, double *re, double *im);

/* ---- u1 ---- */

PC_API pc_status pc_number_state_new(const pc_distribution *spectrum, pc_number_state **out);
PC_API void pc_number_state_free(pc_number_state *state);
PC_API double pc_number_state_variance(const pc_number_state *state);

PC_API pc_status pc_figure_of_merit_exact(const pc_number_state *source, uint64_t n_copies,
                                          const pc_number_state *target, uint64_t m_copies, double *out);
PC_API pc_status pc_figure_of_merit_closed(double sigma_phi_sq, uint64_t n_copies, double sigma_psi_sq,
                                           uint64_t m_copies, double *out);
PC_API pc_status pc_figure_of_merit_mc(const pc_number_state *source, uint64_t n_copies,
                                       const pc_number_state *target, uint64_t m_copies, uint64_t draws,
                                       uint64_t seed, double *estimate, double *stderr_out);

PC_API pc_status pc_posterior_new(const pc_number_state *source, uint64_t n_copies, pc_posterior **out);
PC_API void pc_posterior_free(pc_posterior *posterior);
PC_API pc_status pc_posterior_density(const pc_posterior *posterior, double gamma, int gaussian, double *out);
/* gaussian != 0 samples the Gaussian model instead of the exact posterior. */
PC_API pc_status pc_posterior_sample(const pc_posterior *posterior, uint64_t seed, int gaussian, double *out);

/* ---- zd ---- */

/* out receives d coefficients c_0..c_{d-1}; epsilon may be NULL. */
PC_API pc_status pc_zd_coeffs(const double *p, size_t d, uint64_t copies, double *out, double *epsilon);
PC_API pc_status pc_zd_success_probability(const double *p, size_t d, uint64_t copies, double *out);
PC_API pc_status pc_zd_contraction_rate(const double *p, size_t d, double *out);

/* ---- mixed ---- */

/* states[k] is the k-th component, weights[k] its weight. */
PC_API pc_status pc_mixed_target_new(const pc_number_state *const *states, const double *weights, size_t rank,
                                     pc_mixed_target **out);
PC_API void pc_mixed_target_free(pc_mixed_target *target);
PC_API pc_status pc_epsilon_schedule(uint64_t m_copies, double *out);
PC_API pc_status pc_residual_mass(const pc_mixed_target *target, uint64_t m_copies, double epsilon, double *out);
/* Fidelity lower bound at gamma; exact_classes != 0 evaluates class fidelities exactly. */
PC_API pc_status pc_mixed_lower_bound(const pc_mixed_target *target, uint64_t m_copies, double gamma,
                                      double epsilon, int exact_classes, double *out);
/* epsilon < 0 selects the default schedule. */
PC_API pc_status pc_figure_of_merit_mixed_bound(const pc_number_state *source, uint64_t n_copies,
                                                const pc_mixed_target *target, uint64_t m_copies, double epsilon,
                                                double *out);

/* ---- sweeps ---- */

/* experiment may be NULL (then the document must name it). On validation
 * failure pc_last_error() lists every problem, one per line. */
PC_API pc_status pc_config_parse(const char *text, size_t length, const char *experiment, pc_config **out);
PC_API void pc_config_free(pc_config *config);
PC_API pc_status pc_config_set_seed(pc_config *config, uint64_t seed);
/* NULL when the document has no "output" key. */
PC_API const char *pc_config_output(const pc_config *config);
/* "csv" or "json". */
PC_API const char *pc_config_format(const pc_config *config);

/* jobs == 0 uses the config value, then hardware concurrency. */
PC_API pc_status pc_run(const pc_config *config, unsigned jobs, int timing, pc_result **out);
PC_API void pc_result_free(pc_result *result);
PC_API size_t pc_result_rows(const pc_result *result);
PC_API size_t pc_result_failed_rows(const pc_result *result);
/* 0 success, 2 partial row failures, 3 resource caps. */
PC_API int pc_result_exit_code(const pc_result *result);
/* Returns a malloc'd NUL-terminated string in *out; release with pc_string_free. */
PC_API pc_status pc_result_emit(const pc_result *result, const char *format, char **out);
PC_API pc_status pc_result_write(const pc_result *result, const char *format, const char *path);
PC_API void pc_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* PHASECONV_PHASECONV_H */
