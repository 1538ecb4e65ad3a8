#pragma once

#include <string>

#include "mfg/regdp.hpp"

namespace mfg {

enum class ResidualNorm { max_tv, perron_weighted };
enum class FlowInit { constant_mu0, uniform };

// A solved equilibrium. For finite horizons all flows have horizon T; the
// stationary solver stores single-entry flows (horizon 0).
struct MFESolution {
  bool stationary = false;
  int horizon = 0;
  MeasureFlow measures;
  PolicyFlow policies;
  QFlow qflow;
  double residual = 0.0;
  int iterations = 0;
  std::string norm_used = "max-tv";
};

// One application of the fixed-point operator on measure flows: policies are
// computed by backward induction on the input flow, then pushed forward from
// mu0. Entry 0 of the output re-emits mu0.
MeasureFlow apply_H(const MFGInstance& inst, const MeasureFlow& flow);

// Residual norm between two flows (entries 1..T; entry 0 is pinned to mu0).
double flow_gap_max_tv(const MeasureFlow& a, const MeasureFlow& b);

// Damped fixed-point iteration flow <- lambda*flow + (1-lambda)*H(flow).
// norm = perron_weighted weighs per-time TV gaps by the left Perron vector of
// the contraction matrix A_T derived from the instance's Lipschitz profile.
MFESolution solve_finite_mfe(const MFGInstance& inst, int T, double tol, int max_iter,
                             double lambda = 0.0, ResidualNorm norm = ResidualNorm::max_tv,
                             FlowInit init = FlowInit::constant_mu0);

// Alternating forward-propagation / backward-induction iteration on Q flows.
MFESolution solve_finite_mfe_q_iteration(const MFGInstance& inst, int T, double tol,
                                         int max_iter);

// Stationary equilibrium: outer fixed point on mu with inner value iteration
// at tolerance tol/10. Non-convergence errors report the computed infinite
// spectral radius (expected cause when it is >= 1).
MFESolution solve_stationary_mfe(const MFGInstance& inst, double tol, int max_iter);

// Extension of a finite-horizon solution to all times: entries at t <= T,
// the terminal entries beyond.
struct ExtendedEntry {
  std::vector<Vec> policy;  // [x] -> action simplex
  Vec measure;
};
ExtendedEntry extend_finite_mfe(const MFESolution& sol, int t);

// Large-horizon truncation used as the computational proxy for the
// infinite-horizon non-stationary equilibrium.
MFESolution nonstationary_reference(const MFGInstance& inst, int T_ref, double tol);

std::string solution_to_json(const MFESolution& sol);
MFESolution solution_from_json(const std::string& text);

}  // namespace mfg
