#include "mfglab.h"

#include <cstring>
#include <string>
#include <vector>

#include "mfg/contraction.hpp"
#include "mfg/errors.hpp"
#include "mfg/instance.hpp"
#include "mfg/profile.hpp"
#include "mfg/solvers.hpp"
#include "mfg/studies.hpp"

struct mfg_instance {
  mfg::MFGInstance inst;
};

struct mfg_profile {
  mfg::LipschitzProfile prof;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs fn, translating C++ errors into status codes and the thread-local
// error message.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MFG_OK;
  } catch (const mfg::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.status());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MFG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MFG_ERR_INTERNAL;
  }
}

int require_args(bool ok) {
  if (!ok) g_last_error = "null argument";
  return ok ? MFG_OK : MFG_ERR_INPUT;
}

}  // namespace

extern "C" {

const char* mfg_last_error(void) { return g_last_error.c_str(); }

void mfg_string_free(char* s) { delete[] s; }

int mfg_instance_from_json(const char* json_text, mfg_instance** out) {
  if (require_args(json_text && out)) return MFG_ERR_INPUT;
  return guarded([&] { *out = new mfg_instance{mfg::instance_from_json(json_text)}; });
}

int mfg_instance_to_json(const mfg_instance* inst, char** json_out) {
  if (require_args(inst && json_out)) return MFG_ERR_INPUT;
  return guarded([&] { *json_out = dup_string(mfg::instance_to_json(inst->inst)); });
}

int mfg_instance_generate(int n_states, int n_actions, uint64_t seed, int target,
                          mfg_instance** out) {
  if (require_args(out && (target == 0 || target == 1))) return MFG_ERR_INPUT;
  return guarded([&] {
    const auto t = target == 0 ? mfg::ContractionTarget::finite_horizon
                               : mfg::ContractionTarget::infinite_horizon;
    *out = new mfg_instance{mfg::make_contractive_instance(n_states, n_actions, seed, t)};
  });
}

int mfg_instance_perturb_cost(const mfg_instance* inst, double delta, mfg_instance** out) {
  if (require_args(inst && out)) return MFG_ERR_INPUT;
  return guarded([&] {
    *out = new mfg_instance{mfg::perturb_cost(inst->inst, delta)};
  });
}

void mfg_instance_free(mfg_instance* inst) { delete inst; }

int mfg_profile_from_json(const char* json_text, mfg_profile** out) {
  if (require_args(json_text && out)) return MFG_ERR_INPUT;
  return guarded([&] { *out = new mfg_profile{mfg::profile_from_json(json_text)}; });
}

int mfg_profile_from_instance(const mfg_instance* inst, mfg_profile** out) {
  if (require_args(inst && out)) return MFG_ERR_INPUT;
  return guarded([&] { *out = new mfg_profile{mfg::compute_lipschitz_profile(inst->inst)}; });
}

int mfg_profile_to_json(const mfg_profile* p, char** json_out) {
  if (require_args(p && json_out)) return MFG_ERR_INPUT;
  return guarded([&] { *json_out = dup_string(mfg::profile_to_json(p->prof)); });
}

void mfg_profile_free(mfg_profile* p) { delete p; }

int mfg_contraction_report(const mfg_profile* p, const int* t_list, int t_count, char** json_out,
                           char** csv_out) {
  if (require_args(p && t_list && t_count > 0 && json_out && csv_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    const std::vector<int> ts(t_list, t_list + t_count);
    const mfg::ContractionReport rep = mfg::contraction_report(p->prof, ts);
    *json_out = dup_string(mfg::report_to_json(rep));
    *csv_out = dup_string(mfg::report_to_csv(rep));
  });
}

int mfg_spectrum_sweep(const mfg_profile* p, int t_min, int t_max, int step, char** json_out,
                       char** csv_out) {
  if (require_args(p && json_out && csv_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    const mfg::StudyResult res = mfg::spectrum_sweep(p->prof, t_min, t_max, step);
    *json_out = dup_string(res.to_json());
    *csv_out = dup_string(res.to_csv());
  });
}

int mfg_solve_finite(const mfg_instance* inst, int T, double tol, int max_iter, double lambda,
                     int norm, char** solution_json_out) {
  if (require_args(inst && solution_json_out && (norm == 0 || norm == 1))) return MFG_ERR_INPUT;
  return guarded([&] {
    const auto n = norm == 0 ? mfg::ResidualNorm::max_tv : mfg::ResidualNorm::perron_weighted;
    *solution_json_out =
        dup_string(mfg::solution_to_json(mfg::solve_finite_mfe(inst->inst, T, tol, max_iter,
                                                               lambda, n)));
  });
}

int mfg_solve_finite_q(const mfg_instance* inst, int T, double tol, int max_iter,
                       char** solution_json_out) {
  if (require_args(inst && solution_json_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    *solution_json_out = dup_string(
        mfg::solution_to_json(mfg::solve_finite_mfe_q_iteration(inst->inst, T, tol, max_iter)));
  });
}

int mfg_solve_stationary(const mfg_instance* inst, double tol, int max_iter,
                         char** solution_json_out) {
  if (require_args(inst && solution_json_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    *solution_json_out =
        dup_string(mfg::solution_to_json(mfg::solve_stationary_mfe(inst->inst, tol, max_iter)));
  });
}

int mfg_horizon_study(const mfg_instance* inst, int t_probe, int t_min, int t_max, int t_step,
                      int t_ref, double tol, char** json_out, char** csv_out) {
  if (require_args(inst && json_out && csv_out && t_step > 0)) return MFG_ERR_INPUT;
  return guarded([&] {
    std::vector<int> ts;
    for (int T = t_min; T <= t_max; T += t_step) ts.push_back(T);
    const mfg::StudyResult res = mfg::horizon_error_study(inst->inst, t_probe, ts, t_ref, tol);
    *json_out = dup_string(res.to_json());
    *csv_out = dup_string(res.to_csv());
  });
}

int mfg_stationary_study(const mfg_instance* inst, int t_ref, double tol, char** json_out,
                         char** csv_out) {
  if (require_args(inst && json_out && csv_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    const mfg::StudyResult res = mfg::stationary_gap_study(inst->inst, t_ref, tol);
    *json_out = dup_string(res.to_json());
    *csv_out = dup_string(res.to_csv());
  });
}

int mfg_perturb_study(const mfg_instance* inst_a, const mfg_instance* inst_b, int T, double tol,
                      char** json_out, char** csv_out) {
  if (require_args(inst_a && inst_b && json_out && csv_out)) return MFG_ERR_INPUT;
  return guarded([&] {
    const mfg::StudyResult res = mfg::perturbation_study(inst_a->inst, inst_b->inst, T, tol);
    *json_out = dup_string(res.to_json());
    *csv_out = dup_string(res.to_csv());
  });
}

}  // extern "C"
