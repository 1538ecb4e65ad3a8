/* C interface to the mean-field-game solver and contraction-analysis core.
 *
 * All functions return a status code; 0 is success. On failure the thread's
 * last error message is available via mfg_last_error(). Strings returned
 * through char** out-parameters are heap-allocated and must be released with
 * mfg_string_free(). Handles are opaque and freed with their *_free function.
 */
#ifndef MFGLAB_H
#define MFGLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum mfg_status {
  MFG_OK = 0,
  MFG_ERR_INPUT = 2,
  MFG_ERR_NO_CONVERGENCE = 3,
  MFG_ERR_CONDITION = 4,
  MFG_ERR_INTERNAL = 5
};

typedef struct mfg_instance mfg_instance;
typedef struct mfg_profile mfg_profile;

/* Message for the most recent failure on this thread; empty string if none. */
const char* mfg_last_error(void);
void mfg_string_free(char* s);

/* --- instances ------------------------------------------------------- */
int mfg_instance_from_json(const char* json_text, mfg_instance** out);
int mfg_instance_to_json(const mfg_instance* inst, char** json_out);
/* target: 0 = finite-horizon contraction, 1 = infinite-horizon. */
int mfg_instance_generate(int n_states, int n_actions, uint64_t seed, int target,
                          mfg_instance** out);
/* Copy with each c0 entry shifted by +-delta, sign alternating over the
 * (state, action) grid. A uniform shift would cancel in the softmax, so the
 * alternation is what makes the perturbation observable in equilibria. */
int mfg_instance_perturb_cost(const mfg_instance* inst, double delta, mfg_instance** out);
void mfg_instance_free(mfg_instance* inst);

/* --- profiles -------------------------------------------------------- */
int mfg_profile_from_json(const char* json_text, mfg_profile** out);
int mfg_profile_from_instance(const mfg_instance* inst, mfg_profile** out);
int mfg_profile_to_json(const mfg_profile* p, char** json_out);
void mfg_profile_free(mfg_profile* p);

/* --- contraction analysis -------------------------------------------- */
/* Report over the horizons t_list[0..t_count); JSON and CSV renderings. */
int mfg_contraction_report(const mfg_profile* p, const int* t_list, int t_count,
                           char** json_out, char** csv_out);
int mfg_spectrum_sweep(const mfg_profile* p, int t_min, int t_max, int step, char** json_out,
                       char** csv_out);

/* --- solvers ---------------------------------------------------------- */
/* norm: 0 = max-tv, 1 = perron-weighted. */
int mfg_solve_finite(const mfg_instance* inst, int T, double tol, int max_iter, double lambda,
                     int norm, char** solution_json_out);
int mfg_solve_finite_q(const mfg_instance* inst, int T, double tol, int max_iter,
                       char** solution_json_out);
int mfg_solve_stationary(const mfg_instance* inst, double tol, int max_iter,
                         char** solution_json_out);

/* --- studies ---------------------------------------------------------- */
int mfg_horizon_study(const mfg_instance* inst, int t_probe, int t_min, int t_max, int t_step,
                      int t_ref, double tol, char** json_out, char** csv_out);
int mfg_stationary_study(const mfg_instance* inst, int t_ref, double tol, char** json_out,
                         char** csv_out);
int mfg_perturb_study(const mfg_instance* inst_a, const mfg_instance* inst_b, int T, double tol,
                      char** json_out, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* MFGLAB_H */
