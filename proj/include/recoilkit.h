/* recoilkit public C API.
 *
 * A thin workflow-level surface over the simulation and analysis core:
 * JSON/CSV strings and file paths in, JSON/CSV strings out, with one opaque
 * handle type for simulation results. All functions return rk_status; on
 * failure rk_last_error() yields a thread-local message.
 */
#ifndef RECOILKIT_H
#define RECOILKIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rk_status {
  RK_OK = 0,
  RK_ERR_CONFIG = 2,   /* malformed or inconsistent configuration */
  RK_ERR_INPUT = 3,    /* unreadable or malformed input data */
  RK_ERR_INTERNAL = 4  /* invariant violation inside the toolkit */
} rk_status;

const char* rk_version(void);

/* Message for the most recent failing rk_* call on this thread. */
const char* rk_last_error(void);

/* Frees strings returned through char** out-parameters. */
void rk_string_free(char* s);

/* ---- transport simulation ------------------------------------------- */

typedef struct rk_profiles rk_profiles; /* depth-profile set handle */

/* Runs the binary-collision transport for the JSON config; `threads` <= 0
 * selects one worker. Results are bitwise independent of the thread count
 * for a fixed seed. */
rk_status rk_simulate(const char* config_json, int threads,
                      rk_profiles** out);

/* manifest may be NULL; when set, output files reference it. */
rk_status rk_profiles_write_csv(const rk_profiles* p, const char* path,
                                const char* manifest);
rk_status rk_profiles_write_json(const rk_profiles* p, const char* path,
                                 const char* manifest);
rk_status rk_profiles_summary_json(const rk_profiles* p, char** out_json);
void rk_profiles_free(rk_profiles* p);

/* ---- FIB dosimetry ---------------------------------------------------- */

/* Recipe CSV (name,current_nA,dwell_us,passes,overlap,diameter_nm,
 * diameter_sigma_nm) -> fluence table CSV. */
rk_status rk_fluence_table(const char* recipes_csv, const char* manifest,
                           char** out_csv);

/* ---- spectral analysis ------------------------------------------------ */

/* mode: "peak" | "unmix" | "odmr" | "bin". Options are a JSON object with
 * file paths and fit parameters (see the README for each mode's schema).
 * Individual fit non-convergence is flagged inside the report, not as a
 * status code. */
rk_status rk_analyze(const char* mode, const char* options_json,
                     char** out_report_json);

/* ---- yield pipeline ---------------------------------------------------- */

/* Options: profiles/fluence/unmix-report/config paths plus output options;
 * returns the yield report JSON. */
rk_status rk_yield(const char* options_json, char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* RECOILKIT_H */
