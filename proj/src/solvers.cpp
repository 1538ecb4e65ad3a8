#include "mfg/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfg/contraction.hpp"
#include "mfg/errors.hpp"

namespace mfg {

MeasureFlow apply_H(const MFGInstance& inst, const MeasureFlow& flow) {
  const BackwardResult br = backward_induction(inst, flow);
  const int T = flow.horizon, n = inst.n_states, m = inst.n_actions;
  MeasureFlow out;
  out.horizon = T;
  out.mu.assign(T + 1, Vec(n, 0.0));
  out.mu[0] = inst.mu0;
  for (int t = 0; t < T; ++t) {
    Vec& next = out.mu[t + 1];
    const Vec& mu_t = flow.mu[t];
    for (int x = 0; x < n; ++x) {
      if (mu_t[x] == 0.0) continue;
      const Vec& pol = br.policy.pi[t][x];
      for (int a = 0; a < m; ++a) {
        const double w = mu_t[x] * pol[a];
        if (w == 0.0) continue;
        const Vec p = eval_transition(inst, x, a, mu_t);
        for (int y = 0; y < n; ++y) next[y] += w * p[y];
      }
    }
  }
  return out;
}

double flow_gap_max_tv(const MeasureFlow& a, const MeasureFlow& b) {
  if (a.horizon != b.horizon) throw InputError("flow gap: horizon mismatch");
  double g = 0.0;
  for (int t = 1; t <= a.horizon; ++t) g = std::max(g, tv_distance(a.mu[t], b.mu[t]));
  return g;
}

namespace {

// Weighted residual <r, TV-vector> over t = 1..T.
double flow_gap_weighted(const MeasureFlow& a, const MeasureFlow& b, const Vec& weights) {
  double g = 0.0;
  for (int t = 1; t <= a.horizon; ++t) g += weights[t - 1] * tv_distance(a.mu[t], b.mu[t]);
  return g;
}

MFESolution finish_finite(const MFGInstance& inst, MeasureFlow flow, double residual,
                          int iterations, const char* norm_name) {
  BackwardResult br = backward_induction(inst, flow);
  MFESolution sol;
  sol.stationary = false;
  sol.horizon = flow.horizon;
  sol.measures = std::move(flow);
  sol.policies = std::move(br.policy);
  sol.qflow = std::move(br.q);
  sol.residual = residual;
  sol.iterations = iterations;
  sol.norm_used = norm_name;
  return sol;
}

}  // namespace

MFESolution solve_finite_mfe(const MFGInstance& inst, int T, double tol, int max_iter,
                             double lambda, ResidualNorm norm, FlowInit init) {
  inst.validate();
  if (T < 1) throw InputError("solve_finite_mfe: T must be >= 1");
  if (tol <= 0) throw InputError("solve_finite_mfe: tol must be positive");
  if (lambda < 0.0 || lambda >= 1.0) throw InputError("solve_finite_mfe: lambda must be in [0,1)");

  Vec weights;
  const char* norm_name = "max-tv";
  if (norm == ResidualNorm::perron_weighted) {
    norm_name = "perron-weighted";
    LipschitzProfile prof;
    try {
      prof = compute_lipschitz_profile(inst);
    } catch (const Error& e) {
      throw ConditionError(std::string("perron-weighted norm unavailable (") + e.what() +
                           "); use max-tv");
    }
    if (prof.zero_coupling())
      throw ConditionError("perron-weighted norm unavailable (zero coupling); use max-tv");
    PowerResult pr = spectral_radius_power(build_A_T(prof, T), 1e-12, 1000000);
    weights = pr.left;
  }

  MeasureFlow flow = init == FlowInit::uniform
                         ? MeasureFlow::constant(T, uniform_vec(inst.n_states))
                         : MeasureFlow::constant(T, inst.mu0);
  flow.mu[0] = inst.mu0;

  double residual = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  for (int it = 0; it < max_iter; ++it) {
    MeasureFlow next = apply_H(inst, flow);
    residual = norm == ResidualNorm::perron_weighted ? flow_gap_weighted(next, flow, weights)
                                                     : flow_gap_max_tv(next, flow);
    history.push_back(residual);
    if (residual <= tol) return finish_finite(inst, std::move(flow), residual, it + 1, norm_name);
    for (int t = 1; t <= T; ++t)
      for (int y = 0; y < inst.n_states; ++y)
        flow.mu[t][y] = lambda * flow.mu[t][y] + (1.0 - lambda) * next.mu[t][y];
  }
  std::ostringstream os;
  os << "solve_finite_mfe: residual " << residual << " > tol " << tol << " after " << max_iter
     << " iterations; last residuals:";
  for (size_t i = history.size() > 5 ? history.size() - 5 : 0; i < history.size(); ++i)
    os << " " << history[i];
  throw NoConvergenceError(os.str(), residual);
}

MFESolution solve_finite_mfe_q_iteration(const MFGInstance& inst, int T, double tol,
                                         int max_iter) {
  inst.validate();
  if (T < 1) throw InputError("solve_finite_mfe_q_iteration: T must be >= 1");
  if (tol <= 0) throw InputError("solve_finite_mfe_q_iteration: tol must be positive");
  const int n = inst.n_states, m = inst.n_actions;

  // Forward propagation under a fixed policy flow; transitions see the
  // propagated measures.
  auto propagate = [&](const PolicyFlow& pol_flow) {
    MeasureFlow prop;
    prop.horizon = T;
    prop.mu.assign(T + 1, Vec(n, 0.0));
    prop.mu[0] = inst.mu0;
    for (int t = 0; t < T; ++t) {
      const Vec& mu_t = prop.mu[t];
      Vec& next = prop.mu[t + 1];
      for (int x = 0; x < n; ++x) {
        if (mu_t[x] == 0.0) continue;
        const Vec& pol = pol_flow.pi[t][x];
        for (int a = 0; a < m; ++a) {
          const double w = mu_t[x] * pol[a];
          if (w == 0.0) continue;
          const Vec p = eval_transition(inst, x, a, mu_t);
          for (int y = 0; y < n; ++y) next[y] += w * p[y];
        }
      }
    }
    return prop;
  };
  auto q_gap = [&](const QFlow& a, const QFlow& b) {
    double g = 0.0;
    for (int t = 0; t <= T; ++t)
      for (int x = 0; x < n; ++x)
        for (int a_i = 0; a_i < m; ++a_i)
          g = std::max(g, std::fabs(a.h[t][x][a_i] - b.h[t][x][a_i]));
    return g;
  };

  // Seed with the backward pass against the constant-mu0 flow.
  BackwardResult cur = backward_induction(inst, MeasureFlow::constant(T, inst.mu0));

  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    MeasureFlow prop = propagate(cur.policy);
    BackwardResult refreshed = backward_induction(inst, prop);
    residual = q_gap(refreshed.q, cur.q);
    if (residual <= tol) {
      // Store the measures propagated from the final Q-flow so the residual
      // is exactly the gap recomputable from the stored pair.
      MeasureFlow final_prop = propagate(refreshed.policy);
      BackwardResult check = backward_induction(inst, final_prop);
      MFESolution sol;
      sol.stationary = false;
      sol.horizon = T;
      sol.measures = std::move(final_prop);
      sol.residual = q_gap(check.q, refreshed.q);
      sol.policies = std::move(refreshed.policy);
      sol.qflow = std::move(refreshed.q);
      sol.iterations = it + 1;
      sol.norm_used = "q-sup";
      return sol;
    }
    cur = std::move(refreshed);
  }
  std::ostringstream os;
  os << "solve_finite_mfe_q_iteration: residual " << residual << " > tol " << tol << " after "
     << max_iter << " iterations";
  throw NoConvergenceError(os.str(), residual);
}

MFESolution solve_stationary_mfe(const MFGInstance& inst, double tol, int max_iter) {
  inst.validate();
  if (inst.beta >= 1.0) throw InputError("solve_stationary_mfe: beta must be < 1");
  if (tol <= 0) throw InputError("solve_stationary_mfe: tol must be positive");
  const int n = inst.n_states, m = inst.n_actions;

  Vec mu = inst.mu0;
  double residual = std::numeric_limits<double>::infinity();
  StationaryDPResult dp;
  for (int it = 0; it < max_iter; ++it) {
    dp = value_iteration_stationary(inst, mu, tol / 10.0, 1000000);
    Vec next(n, 0.0);
    for (int x = 0; x < n; ++x) {
      if (mu[x] == 0.0) continue;
      for (int a = 0; a < m; ++a) {
        const double w = mu[x] * dp.policy[x][a];
        if (w == 0.0) continue;
        const Vec p = eval_transition(inst, x, a, mu);
        for (int y = 0; y < n; ++y) next[y] += w * p[y];
      }
    }
    residual = tv_distance(next, mu);
    if (residual <= tol) {
      MFESolution sol;
      sol.stationary = true;
      sol.horizon = 0;
      sol.measures.horizon = 0;
      sol.measures.mu = {mu};
      sol.policies.horizon = 0;
      sol.policies.pi = {dp.policy};
      sol.qflow.horizon = 0;
      sol.qflow.h = {dp.h};
      sol.residual = residual;
      sol.iterations = it + 1;
      sol.norm_used = "max-tv";
      return sol;
    }
    mu = std::move(next);
  }
  double radius = std::numeric_limits<double>::quiet_NaN();
  try {
    const LipschitzProfile prof = compute_lipschitz_profile(inst);
    radius = prof.bar_k + prof.blk / (1.0 - prof.beta);
  } catch (const Error&) {
  }
  std::ostringstream os;
  os << "solve_stationary_mfe: residual " << residual << " > tol " << tol << " after " << max_iter
     << " iterations (infinite-horizon spectral radius " << radius
     << "; convergence is only guaranteed below 1)";
  throw NoConvergenceError(os.str(), residual);
}

ExtendedEntry extend_finite_mfe(const MFESolution& sol, int t) {
  if (sol.stationary) throw InputError("extend_finite_mfe: solution must be finite-horizon");
  if (t < 0) throw InputError("extend_finite_mfe: t must be >= 0");
  const int s = std::min(t, sol.horizon);
  return ExtendedEntry{sol.policies.pi[s], sol.measures.mu[s]};
}

MFESolution nonstationary_reference(const MFGInstance& inst, int T_ref, double tol) {
  return solve_finite_mfe(inst, T_ref, tol, 100000, 0.0, ResidualNorm::max_tv);
}

std::string solution_to_json(const MFESolution& sol) {
  nlohmann::json j;
  j["horizon"] = sol.stationary ? nlohmann::json("stationary") : nlohmann::json(sol.horizon);
  j["measures"] = sol.measures.mu;
  j["policies"] = sol.policies.pi;
  j["h"] = sol.qflow.h;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["norm_used"] = sol.norm_used;
  return j.dump(2);
}

MFESolution solution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("solution JSON parse error: ") + e.what());
  }
  MFESolution sol;
  try {
    if (j.at("horizon").is_string()) {
      sol.stationary = true;
      sol.horizon = 0;
    } else {
      sol.stationary = false;
      sol.horizon = j.at("horizon").get<int>();
    }
    sol.measures.mu = j.at("measures").get<std::vector<Vec>>();
    sol.measures.horizon = sol.stationary ? 0 : sol.horizon;
    sol.policies.pi = j.at("policies").get<std::vector<std::vector<Vec>>>();
    sol.policies.horizon = sol.measures.horizon;
    sol.qflow.h = j.at("h").get<std::vector<std::vector<Vec>>>();
    sol.qflow.horizon = sol.measures.horizon;
    sol.residual = j.at("residual").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    sol.norm_used = j.at("norm_used").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("solution JSON schema error: ") + e.what());
  }
  return sol;
}

}  // namespace mfg
