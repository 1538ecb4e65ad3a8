#pragma once

#include <vector>

#include "mfg/instance.hpp"

namespace mfg {

// Flow of population measures mu_0 ... mu_T (T+1 entries, entry 0 = mu0).
struct MeasureFlow {
  int horizon = 0;
  std::vector<Vec> mu;  // size horizon + 1

  static MeasureFlow constant(int T, const Vec& mu0);
  void validate(const MFGInstance& inst) const;
};

// Linear parts h_t(x,a) of the regularized state-action functions,
// Q_t(x,u) = <h_t(x,.), u> + Omega(u).
struct QFlow {
  int horizon = 0;
  std::vector<std::vector<Vec>> h;  // [t][x][a], t = 0..T
};

// Softmax policies induced by a QFlow, one stochastic matrix per time.
struct PolicyFlow {
  int horizon = 0;
  std::vector<std::vector<Vec>> pi;  // [t][x] -> simplex over actions
};

// Regularized minimum over the action simplex with entropic regularizer:
// -tau * log sum_a exp(-h(a)/tau), evaluated with max-shift.
// Satisfies min(h) - tau*log(m) <= result <= min(h).
double soft_min(const Vec& h_row, double tau);

// Unique minimizer of <h,u> + tau*sum u log u over the simplex.
Vec softmax_policy(const Vec& h_row, double tau);

struct BackwardResult {
  QFlow q;
  PolicyFlow policy;
  std::vector<Vec> value;  // [t][x], soft-min of each h row
};

// Backward induction against a fixed measure flow:
//   h_T(x,a) = c(x,a,mu_T)
//   h_t(x,a) = c(x,a,mu_t) + beta * sum_y V_{t+1}(y) p(y|x,a,mu_t)
// with V_s(y) the soft-min of h_s(y,.). Policies are the softmax rows.
BackwardResult backward_induction(const MFGInstance& inst, const MeasureFlow& flow);

struct StationaryDPResult {
  std::vector<Vec> h;       // [x][a]
  Vec value;                // soft-min per state
  std::vector<Vec> policy;  // softmax per state
  double residual = 0.0;    // sup-norm Bellman residual
  int iterations = 0;
};

// Value iteration for the frozen-measure discounted problem; contracts at
// rate beta in sup norm. Throws NoConvergenceError past max_iter.
StationaryDPResult value_iteration_stationary(const MFGInstance& inst, const Vec& mu,
                                              double tol, int max_iter);

}  // namespace mfg
