#include "mfg/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mfg/errors.hpp"

namespace mfg {

bool StudyResult::all_pass() const {
  for (const Flag& f : flags)
    if (!f.pass) return false;
  return true;
}

std::string StudyResult::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string StudyResult::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["columns"] = columns;
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); };
  nlohmann::json jr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) r.push_back(num(v));
    jr.push_back(r);
  }
  j["rows"] = jr;
  nlohmann::json jd = nlohmann::json::object();
  for (const auto& [k, v] : diagnostics) jd[k] = num(v);
  j["diagnostics"] = jd;
  nlohmann::json jf = nlohmann::json::array();
  for (const Flag& f : flags) jf.push_back({{"name", f.name}, {"pass", f.pass}, {"slack", f.slack}});
  j["flags"] = jf;
  j["all_pass"] = all_pass();
  return j.dump(2);
}

int worker_count() {
  const char* env = std::getenv("MFGLAB_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Simple static-chunk parallel map over row indices.
void parallel_rows(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

}  // namespace

StudyResult spectrum_sweep(const LipschitzProfile& p, int t_min, int t_max, int step) {
  if (t_min < 1 || t_max < t_min || step < 1)
    throw InputError("spectrum_sweep: invalid horizon range");
  std::vector<int> ts;
  for (int T = t_min; T <= t_max; T += step) ts.push_back(T);

  StudyResult res;
  res.kind = "spectrum_sweep";
  res.columns = {"T", "rho_det", "rho_power", "gershgorin", "asym_lower", "asym_upper"};
  res.rows.assign(ts.size(), {});
  const bool coupled = !(p.blk == 0.0 && p.l1k == 0.0);
  parallel_rows(static_cast<int>(ts.size()), [&](int i) {
    const int T = ts[i];
    const double rho_p = spectral_radius_power_AT(p, T, 1e-12, 10000000);
    const double rho_d =
        (T >= 2 && coupled) ? spectral_radius_detsearch(p, T, 1e-13) : rho_p;
    const AsymptoticBounds ab = asymptotic_bounds_AT(p, T);
    res.rows[i] = {static_cast<double>(T),      rho_d, rho_p, gershgorin_bound(p, T),
                   ab.lower_defined ? ab.lower : kNan, ab.upper_defined ? ab.upper : kNan};
  });

  const double limit = limit_bound_AT(p);
  double mono_slack = std::numeric_limits<double>::infinity();
  double gersh_slack = std::numeric_limits<double>::infinity();
  double asym_slack = std::numeric_limits<double>::infinity();
  double est_gap = 0.0;
  for (size_t i = 0; i < res.rows.size(); ++i) {
    const double T = res.rows[i][0], rho_d = res.rows[i][1], rho = res.rows[i][2];
    const double gersh = res.rows[i][3], lo = res.rows[i][4], up = res.rows[i][5];
    if (i > 0) mono_slack = std::min(mono_slack, rho - res.rows[i - 1][2]);
    gersh_slack = std::min(gersh_slack, gersh - rho);
    est_gap = std::max(est_gap, std::fabs(rho - rho_d));
    if (!std::isnan(lo)) {
      asym_slack = std::min(asym_slack, rho - lo);
      asym_slack = std::min(asym_slack, limit - rho);
    }
    if (T >= 50 && !std::isnan(up)) asym_slack = std::min(asym_slack, up - rho);
  }
  res.diagnostics = {{"limit_bound_AT", limit},
                     {"horizon_independent_bound", horizon_independent_bound(p)},
                     {"max_estimator_gap", est_gap}};
  res.flags = {{"rho_nondecreasing", mono_slack >= -1e-10, mono_slack},
               {"gershgorin_containment", gersh_slack >= -1e-9, gersh_slack},
               {"asymptotic_containment", asym_slack >= -1e-8, asym_slack},
               {"estimator_agreement", est_gap <= 1e-8, 1e-8 - est_gap}};
  return res;
}

StudyResult horizon_error_study(const MFGInstance& inst, int t_probe,
                                const std::vector<int>& t_list, int T_ref, double tol) {
  if (t_list.empty()) throw InputError("horizon_error_study: empty horizon list");
  for (size_t i = 1; i < t_list.size(); ++i)
    if (t_list[i] <= t_list[i - 1])
      throw InputError("horizon_error_study: horizon list must be ascending");
  if (t_probe < 0 || t_probe >= t_list.front())
    throw InputError("horizon_error_study: t_probe must be below the smallest horizon");
  if (T_ref <= t_list.back() + 20)
    throw InputError("horizon_error_study: T_ref must exceed max horizon by more than 20");

  const MFESolution ref = nonstationary_reference(inst, T_ref, tol);
  StudyResult res;
  res.kind = "horizon_error_study";
  res.columns = {"T", "gap"};
  res.rows.assign(t_list.size(), {});
  parallel_rows(static_cast<int>(t_list.size()), [&](int i) {
    const MFESolution sol = solve_finite_mfe(inst, t_list[i], tol, 100000);
    res.rows[i] = {static_cast<double>(t_list[i]),
                   tv_distance(ref.measures.mu[t_probe], sol.measures.mu[t_probe])};
  });

  // Least-squares slope of log(gap) vs T over rows above the numeric floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& row : res.rows) {
    if (row[1] <= 1e-300) continue;
    const double x = row[0], y = std::log(row[1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double slope =
      cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : kNan;

  const size_t q1 = res.rows.size() / 4;
  double tail_slack = std::numeric_limits<double>::infinity();
  for (size_t i = q1 + 1; i < res.rows.size(); ++i)
    tail_slack = std::min(tail_slack, res.rows[i - 1][1] - res.rows[i][1]);
  const double final_gap = res.rows.back()[1];

  res.diagnostics = {{"log_gap_slope", slope}, {"final_gap", final_gap}};
  res.flags = {{"tail_nonincreasing", tail_slack >= -1e-9, tail_slack},
               {"final_gap_small", final_gap <= tol, tol - final_gap},
               {"negative_slope", !std::isnan(slope) && slope < 0.0, -slope}};
  return res;
}

StudyResult stationary_gap_study(const MFGInstance& inst, int T_ref, double tol) {
  const LipschitzProfile prof = compute_lipschitz_profile(inst);
  const InfiniteRadius ir = infinite_radius(prof);
  if (!ir.contractive) {
    std::ostringstream os;
    os << "stationary_gap_study: infinite-horizon spectral radius " << ir.value << " >= 1";
    throw ConditionError(os.str());
  }
  const double C = ir.value;
  const MFESolution stat = solve_stationary_mfe(inst, tol / 10.0, 100000);
  const MFESolution ref = nonstationary_reference(inst, T_ref, tol / 10.0);

  StudyResult res;
  res.kind = "stationary_gap_study";
  res.columns = {"t", "gap_mu", "gap_q"};
  for (int t = 0; t <= T_ref; ++t) {
    const double gap_mu = tv_distance(stat.measures.mu[0], ref.measures.mu[t]);
    double gap_q = 0.0;
    for (int x = 0; x < inst.n_states; ++x)
      for (int a = 0; a < inst.n_actions; ++a)
        gap_q = std::max(gap_q, std::fabs(stat.qflow.h[0][x][a] - ref.qflow.h[t][x][a]));
    res.rows.push_back({static_cast<double>(t), gap_mu, gap_q});
  }

  // Suffix suprema of gap_mu for the geometric-envelope checks.
  std::vector<double> sup_tail(T_ref + 2, 0.0);
  for (int t = T_ref; t >= 0; --t)
    sup_tail[t] = std::max(sup_tail[t + 1], res.rows[t][1]);
  const double sup0 = sup_tail[0];

  double mu_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t <= T_ref / 2; ++t)
    mu_slack = std::min(mu_slack, std::pow(C, t) * sup0 + 1e-9 - sup_tail[t]);

  // Q-function envelope with lookahead s = t + ceil(log tol / log beta).
  const int lookahead =
      static_cast<int>(std::ceil(std::log(tol) / std::log(inst.beta)));
  double q_slack = std::numeric_limits<double>::infinity();
  const double m_over = prof.m_bound / (1.0 - prof.beta);
  for (int t = 0; t <= T_ref / 2; ++t) {
    const int s = t + std::max(lookahead, 1);
    const double bound = std::pow(prof.beta, s - t) * m_over +
                         prof.bar_l * (1.0 - std::pow(prof.beta, s - t)) / (1.0 - prof.beta) *
                             std::pow(C, t) * sup0;
    q_slack = std::min(q_slack, bound + 1e-9 - res.rows[t][2]);
  }

  // Tail closeness of the extended finite-horizon solution to the
  // stationary measure.
  double tail_gap = 0.0;
  for (int t = T_ref / 2 + 1; t <= T_ref; ++t) tail_gap = std::max(tail_gap, res.rows[t][1]);

  res.diagnostics = {{"infinite_radius", C},
                     {"sup_gap_mu", sup0},
                     {"tail_gap_mu", tail_gap}};
  res.flags = {{"mu_geometric_envelope", mu_slack >= 0.0, mu_slack},
               {"q_envelope", q_slack >= 0.0, q_slack},
               {"tail_near_stationary", tail_gap <= 2.0 * tol, 2.0 * tol - tail_gap}};
  return res;
}

namespace {

// TV distance between joint policy (x) measure distributions on X x A.
double joint_tv(const std::vector<Vec>& pol_a, const Vec& mu_a, const std::vector<Vec>& pol_b,
                const Vec& mu_b) {
  double s = 0.0;
  for (size_t x = 0; x < mu_a.size(); ++x)
    for (size_t a = 0; a < pol_a[x].size(); ++a)
      s += std::fabs(mu_a[x] * pol_a[x][a] - mu_b[x] * pol_b[x][a]);
  return 0.5 * s;
}

}  // namespace

StudyResult perturbation_study(const MFGInstance& inst_a, const MFGInstance& inst_b, int T,
                               double tol) {
  if (inst_a.n_states != inst_b.n_states || inst_a.n_actions != inst_b.n_actions)
    throw InputError("perturbation_study: instance dimensions differ");
  for (const MFGInstance* inst : {&inst_a, &inst_b}) {
    const InfiniteRadius ir = infinite_radius(compute_lipschitz_profile(*inst));
    if (!ir.contractive) {
      std::ostringstream os;
      os << "perturbation_study: instance not contractive (infinite radius " << ir.value << ")";
      throw ConditionError(os.str());
    }
  }

  const double solver_tol = std::min(tol * 1e-3, 1e-9);
  const MFESolution fin_a = solve_finite_mfe(inst_a, T, solver_tol, 100000);
  const MFESolution fin_b = solve_finite_mfe(inst_b, T, solver_tol, 100000);
  const MFESolution stat_a = solve_stationary_mfe(inst_a, solver_tol, 100000);
  const MFESolution stat_b = solve_stationary_mfe(inst_b, solver_tol, 100000);

  StudyResult res;
  res.kind = "perturbation_study";
  res.columns = {"t", "joint_tv"};
  double eps_fin = 0.0;
  for (int t = 0; t <= T; ++t) {
    const double g = joint_tv(fin_a.policies.pi[t], fin_a.measures.mu[t], fin_b.policies.pi[t],
                              fin_b.measures.mu[t]);
    eps_fin = std::max(eps_fin, g);
    res.rows.push_back({static_cast<double>(t), g});
  }
  const double eps_stat = joint_tv(stat_a.policies.pi[0], stat_a.measures.mu[0],
                                   stat_b.policies.pi[0], stat_b.measures.mu[0]);

  res.diagnostics = {{"eps_fin", eps_fin}, {"eps_stat", eps_stat}};
  res.flags = {{"stationary_within_3x_finite", eps_stat <= 3.0 * eps_fin + tol,
                3.0 * eps_fin + tol - eps_stat}};
  return res;
}

}  // namespace mfg
