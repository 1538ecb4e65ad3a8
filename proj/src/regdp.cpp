#include "mfg/regdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

MeasureFlow MeasureFlow::constant(int T, const Vec& mu0) {
  MeasureFlow f;
  f.horizon = T;
  f.mu.assign(T + 1, mu0);
  return f;
}

void MeasureFlow::validate(const MFGInstance& inst) const {
  if (horizon < 1) throw InputError("measure flow: horizon must be >= 1");
  if (static_cast<int>(mu.size()) != horizon + 1)
    throw InputError("measure flow: entry count does not match horizon");
  for (const Vec& m : mu) {
    if (static_cast<int>(m.size()) != inst.n_states)
      throw InputError("measure flow: entry dimension mismatch");
    validate_simplex(m, "measure flow entry");
  }
  if (tv_distance(mu[0], inst.mu0) > kSimplexTol)
    throw InputError("measure flow: entry 0 must equal the instance's mu0");
}

double soft_min(const Vec& h_row, double tau) {
  if (tau <= 0.0) throw InputError("soft_min: tau must be positive");
  if (h_row.empty()) throw InputError("soft_min: empty row");
  double lo = std::numeric_limits<double>::infinity();
  for (double h : h_row) {
    if (std::isnan(h)) throw InputError("soft_min: NaN input");
    lo = std::min(lo, h);
  }
  double s = 0.0;
  for (double h : h_row) s += std::exp(-(h - lo) / tau);
  return lo - tau * std::log(s);
}

Vec softmax_policy(const Vec& h_row, double tau) {
  if (tau <= 0.0) throw InputError("softmax_policy: tau must be positive");
  if (h_row.empty()) throw InputError("softmax_policy: empty row");
  double lo = std::numeric_limits<double>::infinity();
  for (double h : h_row) {
    if (std::isnan(h)) throw InputError("softmax_policy: NaN input");
    lo = std::min(lo, h);
  }
  Vec u(h_row.size());
  double s = 0.0;
  for (size_t a = 0; a < h_row.size(); ++a) {
    u[a] = std::exp(-(h_row[a] - lo) / tau);
    s += u[a];
  }
  for (double& w : u) w /= s;
  return u;
}

BackwardResult backward_induction(const MFGInstance& inst, const MeasureFlow& flow) {
  flow.validate(inst);
  const int T = flow.horizon, n = inst.n_states, m = inst.n_actions;
  BackwardResult r;
  r.q.horizon = T;
  r.q.h.assign(T + 1, std::vector<Vec>(n, Vec(m, 0.0)));
  r.policy.horizon = T;
  r.policy.pi.assign(T + 1, std::vector<Vec>(n));
  r.value.assign(T + 1, Vec(n, 0.0));

  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) r.q.h[T][x][a] = eval_cost(inst, x, a, flow.mu[T]);
  for (int x = 0; x < n; ++x) {
    r.value[T][x] = soft_min(r.q.h[T][x], inst.tau);
    r.policy.pi[T][x] = softmax_policy(r.q.h[T][x], inst.tau);
  }

  for (int t = T - 1; t >= 0; --t) {
    const Vec& mu_t = flow.mu[t];
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < m; ++a) {
        const Vec p = eval_transition(inst, x, a, mu_t);
        double cont = 0.0;
        for (int y = 0; y < n; ++y) cont += r.value[t + 1][y] * p[y];
        r.q.h[t][x][a] = eval_cost(inst, x, a, mu_t) + inst.beta * cont;
      }
    for (int x = 0; x < n; ++x) {
      r.value[t][x] = soft_min(r.q.h[t][x], inst.tau);
      r.policy.pi[t][x] = softmax_policy(r.q.h[t][x], inst.tau);
    }
  }
  return r;
}

StationaryDPResult value_iteration_stationary(const MFGInstance& inst, const Vec& mu,
                                              double tol, int max_iter) {
  if (inst.beta >= 1.0) throw InputError("value_iteration_stationary: beta must be < 1");
  if (tol <= 0.0) throw InputError("value_iteration_stationary: tol must be positive");
  const int n = inst.n_states, m = inst.n_actions;
  validate_simplex(mu, "frozen measure");

  // The measure is frozen, so cost and transition tables are fixed.
  std::vector<Vec> cost(n, Vec(m));
  std::vector<std::vector<Vec>> trans(n, std::vector<Vec>(m));
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) {
      cost[x][a] = eval_cost(inst, x, a, mu);
      trans[x][a] = eval_transition(inst, x, a, mu);
    }

  StationaryDPResult r;
  r.h.assign(n, Vec(m, 0.0));
  Vec value(n, 0.0);
  for (int x = 0; x < n; ++x) value[x] = soft_min(r.h[x], inst.tau);
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  std::vector<Vec> next(n, Vec(m, 0.0));
  for (; it < max_iter; ++it) {
    residual = 0.0;
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < m; ++a) {
        double cont = 0.0;
        for (int y = 0; y < n; ++y) cont += value[y] * trans[x][a][y];
        next[x][a] = cost[x][a] + inst.beta * cont;
        residual = std::max(residual, std::fabs(next[x][a] - r.h[x][a]));
      }
    r.h.swap(next);
    for (int x = 0; x < n; ++x) value[x] = soft_min(r.h[x], inst.tau);
    if (residual <= tol) break;
  }
  if (residual > tol) {
    std::ostringstream os;
    os << "value_iteration_stationary: residual " << residual << " > tol " << tol << " after "
       << max_iter << " sweeps";
    throw NoConvergenceError(os.str(), residual);
  }
  r.value = value;
  r.policy.assign(n, Vec());
  for (int x = 0; x < n; ++x) r.policy[x] = softmax_policy(r.h[x], inst.tau);
  r.residual = residual;
  r.iterations = it + 1;
  return r;
}

}  // namespace mfg
