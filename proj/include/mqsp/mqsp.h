/* Copyright 2025 The mqsp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MQSP_MQSP_H_
#define MQSP_MQSP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MQSP_BUILDING_LIBRARY)
#define MQSP_API __attribute__((visibility("default")))
#else
#define MQSP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mqsp_status {
  MQSP_OK = 0,
  MQSP_ERR_VALIDATION = 1,
  MQSP_ERR_DEGREE_OVERFLOW = 2,
  MQSP_ERR_DOMAIN = 3,
  MQSP_ERR_CRC_VIOLATION = 4,
  MQSP_ERR_INSTABILITY = 5,
  MQSP_ERR_NOT_CONVERGED = 6,
  MQSP_ERR_INDEFINITE = 7,
  MQSP_ERR_CONFIG = 8,
  MQSP_ERR_IO = 9,
  MQSP_ERR_NULL_ARGUMENT = 10,
  MQSP_ERR_INTERNAL = 11
} mqsp_status;

typedef struct mqsp_bilaurent mqsp_bilaurent;
typedef struct mqsp_circuit mqsp_circuit;
typedef struct mqsp_hamiltonian mqsp_hamiltonian;

MQSP_API const char* mqsp_version(void);
MQSP_API const char* mqsp_status_name(mqsp_status s);
/* Message of the last failed call on this thread; empty after success. */
MQSP_API const char* mqsp_last_error(void);
/* Magnitude attached to the last error (CRC deviation, kappa, residual, ...). */
MQSP_API double mqsp_last_error_value(void);
/* Frees strings returned through char** out-parameters. */
MQSP_API void mqsp_string_free(char* s);

/* Bivariate Laurent polynomials: {"window1": [lo, hi], "window2": [lo, hi],
 * "coeffs": [[re, im], ...]} row-major. */
MQSP_API mqsp_status mqsp_bilaurent_from_json(const char* json, mqsp_bilaurent** out);
MQSP_API mqsp_status mqsp_bilaurent_to_json(const mqsp_bilaurent* p, char** out);
MQSP_API mqsp_status mqsp_bilaurent_eval(const mqsp_bilaurent* p, double theta1, double theta2, double* re,
                                         double* im);
MQSP_API mqsp_status mqsp_bilaurent_window(const mqsp_bilaurent* p, int* lo1, int* hi1, int* lo2, int* hi2);
MQSP_API void mqsp_bilaurent_free(mqsp_bilaurent* p);

/* Circuits: {"schedule": "RRI...", "angles": [[theta, phi], ...]}. */
MQSP_API mqsp_status mqsp_circuit_from_json(const char* json, mqsp_circuit** out);
MQSP_API mqsp_status mqsp_circuit_to_json(const mqsp_circuit* c, char** out);
/* Angles theta in [0.1, 1.4], phi in (-pi, pi], from a seeded generator. */
MQSP_API mqsp_status mqsp_circuit_random(const char* schedule, uint64_t seed, mqsp_circuit** out);
MQSP_API mqsp_status mqsp_circuit_p(const mqsp_circuit* c, mqsp_bilaurent** out);
MQSP_API mqsp_status mqsp_circuit_q(const mqsp_circuit* c, mqsp_bilaurent** out);
MQSP_API mqsp_status mqsp_circuit_roundtrip(const mqsp_bilaurent* target, const mqsp_circuit* c, double* rel_err);
MQSP_API void mqsp_circuit_free(mqsp_circuit* c);

/* Hamiltonian pairs: {"H_R": rows, "H_I": rows, "label": ...}, entries [re, im]. */
MQSP_API mqsp_status mqsp_hamiltonian_from_json(const char* json, mqsp_hamiltonian** out);
MQSP_API mqsp_status mqsp_hamiltonian_norms(const mqsp_hamiltonian* h, int* dim, double* alpha_R, double* beta_I);
MQSP_API void mqsp_hamiltonian_free(mqsp_hamiltonian* h);

/* Dyson target from DysonParams JSON. Outputs: target JSON, exact-grid CSV and
 * a deficit report JSON. Any out-parameter may be NULL. */
MQSP_API mqsp_status mqsp_target_build(const char* params_json, char** target_json, char** grid_csv,
                                       char** report_json);

/* SOS, peel and refine. target_json is a polynomial, a target-build output or
 * a circuit (peeled against its own Q). An optional "complements" array of
 * polynomials replaces the SOS factorization of 1 - |P|^2. options_json keys: lenient, restarts, sigma, seed, max_iters, window
 * ("analytic" or "laurent"), schedule. */
MQSP_API mqsp_status mqsp_angles(const char* target_json, const char* options_json, char** circuit_json,
                                 char** report_json, char** peel_csv, char** trace_csv, char** restarts_csv);

/* options_json keys: method (exact, midpoint, dyson-lcu, lorentzian), T, r, M,
 * s_max, Mpts, rk4_steps, sweep (list of r). Dimensions above 64 are refused. */
MQSP_API mqsp_status mqsp_simulate(const mqsp_hamiltonian* h, const char* options_json, char** result_json,
                                   char** sweep_csv);

/* options_json keys: preset (weak, strong) or alphaT, betaT, eps; survival_sq,
 * dR_seg, M_seg. */
MQSP_API mqsp_status mqsp_estimate(const char* options_json, char** table_json, char** table_csv,
                                   char** table_text);

/* subset: NULL or "" for all criteria, else group names or ids, comma-separated.
 * all_passed is 1 iff every selected criterion passed. */
MQSP_API mqsp_status mqsp_verify(const char* subset, uint64_t seed, double perturb_angles, char** report_json,
                                 char** summary_text, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* MQSP_MQSP_H_ */
