#pragma once

#include <string>
#include <vector>

#include "mfg/contraction.hpp"
#include "mfg/solvers.hpp"

namespace mfg {

// Tabular output of one experiment plus the pass/fail verdicts against the
// theoretical envelopes, each with the worst slack observed.
struct StudyResult {
  struct Flag {
    std::string name;
    bool pass = false;
    double slack = 0.0;  // worst margin; negative means violated by |slack|
  };

  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<Flag> flags;

  bool all_pass() const;
  std::string to_csv() const;   // header row + full-precision rows
  std::string to_json() const;  // rows + diagnostics + flags
};

// rho(A_T) across horizons with every closed-form bound alongside.
// Columns: T, rho_det, rho_power, gershgorin, asym_lower, asym_upper.
StudyResult spectrum_sweep(const LipschitzProfile& p, int t_min, int t_max, int step);

// Horizon-truncation error at a fixed probe time: gap(T) =
// TV(mu^{T_ref}_{t_probe}, mu^T_{t_probe}). Columns: T, gap.
StudyResult horizon_error_study(const MFGInstance& inst, int t_probe,
                                const std::vector<int>& t_list, int T_ref, double tol);

// Stationary equilibrium vs a long-horizon truncation. Columns: t, gap_mu,
// gap_q. Envelope rate C = infinite_radius; requires C < 1.
StudyResult stationary_gap_study(const MFGInstance& inst, int T_ref, double tol);

// Sensitivity of equilibria to a model perturbation, measured on joint
// policy (x) measure distributions (TV on the finite product space).
StudyResult perturbation_study(const MFGInstance& inst_a, const MFGInstance& inst_b, int T,
                               double tol);

// Worker cap for row-parallel study evaluation; reads MFGLAB_THREADS
// (default 1).
int worker_count();

}  // namespace mfg
