#include "mfg/profile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

void fill_derived(LipschitzProfile& p) {
  p.blk = p.hat_k - p.bar_k;
  p.r_const = p.beta * (p.bar_k + p.l1k);
}

}  // namespace

LipschitzProfile profile_from_raw(double l1, double k1, double beta, double rho,
                                  bool small_variant, double m_bound) {
  if (l1 < 0 || k1 < 0 || rho <= 0 || beta < 0 || beta >= 1)
    throw InputError("profile_from_raw: constants out of range");
  const double bk = beta * k1 / 2.0;
  if (bk >= 1.0) {
    std::ostringstream os;
    os << "barL undefined: beta*K1/2 = " << bk << " >= 1 (beta=" << beta << ", K1=" << k1 << ")";
    throw ConditionError(os.str());
  }
  LipschitzProfile p;
  p.l1 = l1;
  p.k1 = k1;
  p.rho = rho;
  p.beta = beta;
  p.has_raw = true;
  p.barl_small_variant = small_variant;
  p.bar_l = small_variant ? l1 / (1.0 - bk) : l1 * (1.0 + bk) / (1.0 - bk);
  p.bar_k = 1.5 * k1 + k1 * p.bar_l / (2.0 * rho * (1.0 - beta));
  p.hat_k = p.bar_k + k1 * p.bar_l / rho;
  p.l1k = l1 * k1 / rho;
  p.m_bound = m_bound;
  fill_derived(p);
  return p;
}

LipschitzProfile profile_from_composite(double beta, double bar_k, double blk, double l1k) {
  if (beta < 0 || beta >= 1 || bar_k < 0 || blk < 0 || l1k < 0)
    throw InputError("profile_from_composite: constants out of range");
  LipschitzProfile p;
  p.beta = beta;
  p.bar_k = bar_k;
  p.hat_k = bar_k + blk;
  p.l1k = l1k;
  p.has_raw = false;
  p.l1 = std::numeric_limits<double>::quiet_NaN();
  p.k1 = std::numeric_limits<double>::quiet_NaN();
  p.rho = std::numeric_limits<double>::quiet_NaN();
  p.bar_l = std::numeric_limits<double>::quiet_NaN();
  fill_derived(p);
  return p;
}

LipschitzProfile compute_lipschitz_profile(const MFGInstance& inst, bool small_variant) {
  inst.validate();
  const int n = inst.n_states, m = inst.n_actions;

  // Oscillations over the measure argument are evaluated at the simplex
  // vertices delta_z only: cost and transition are affine in mu, so simplex
  // maxima are attained there.
  double osc_x_c = 0.0, osc_a_c = 0.0, osc_mu_c = 0.0;
  double osc_x_p = 0.0, osc_a_p = 0.0, osc_mu_p = 0.0;
  for (int z = 0; z < n; ++z) {
    const Vec dz = delta_vec(n, z);
    for (int a = 0; a < m; ++a)
      for (int x = 0; x < n; ++x)
        for (int x2 = x + 1; x2 < n; ++x2) {
          osc_x_c = std::max(osc_x_c,
                             std::fabs(eval_cost(inst, x, a, dz) - eval_cost(inst, x2, a, dz)));
          osc_x_p = std::max(osc_x_p, tv_distance(eval_transition(inst, x, a, dz),
                                                  eval_transition(inst, x2, a, dz)));
        }
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < m; ++a)
        for (int a2 = a + 1; a2 < m; ++a2) {
          osc_a_c = std::max(osc_a_c,
                             std::fabs(eval_cost(inst, x, a, dz) - eval_cost(inst, x, a2, dz)));
          osc_a_p = std::max(osc_a_p, tv_distance(eval_transition(inst, x, a, dz),
                                                  eval_transition(inst, x, a2, dz)));
        }
  }
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a)
      for (int z = 0; z < n; ++z)
        for (int z2 = z + 1; z2 < n; ++z2) {
          osc_mu_c = std::max(osc_mu_c, std::fabs(inst.wc[x][a][z] - inst.wc[x][a][z2]));
          osc_mu_p = std::max(osc_mu_p,
                              inst.eta_p * tv_distance(inst.p1[x][a][z], inst.p1[x][a][z2]));
        }

  const double l1 = std::max({osc_x_c, 0.5 * osc_a_c, 0.5 * osc_mu_c});
  const double k1 = std::max({2.0 * osc_x_p, osc_a_p, osc_mu_p});
  return profile_from_raw(l1, k1, inst.beta, inst.tau, small_variant, inst.cost_bound());
}

LipschitzProfile profile_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("profile JSON parse error: ") + e.what());
  }
  try {
    if (j.contains("l1") && j.contains("k1")) {
      if (!j.contains("rho")) throw InputError("profile JSON: missing key 'rho'");
      if (!j.contains("beta")) throw InputError("profile JSON: missing key 'beta'");
      return profile_from_raw(j.at("l1").get<double>(), j.at("k1").get<double>(),
                              j.at("beta").get<double>(), j.at("rho").get<double>(),
                              j.value("barl_small_variant", false), j.value("m_bound", 0.0));
    }
    if (!j.contains("beta")) throw InputError("profile JSON: missing key 'beta'");
    if (!j.contains("bar_k")) throw InputError("profile JSON: missing key 'bar_k'");
    double blk;
    if (j.contains("bar_l_k1_over_rho")) {
      blk = j.at("bar_l_k1_over_rho").get<double>();
    } else if (j.contains("k1_over_rho") && j.contains("bar_l")) {
      blk = j.at("k1_over_rho").get<double>() * j.at("bar_l").get<double>();
    } else {
      throw InputError(
          "profile JSON: need either 'bar_l_k1_over_rho' or both 'k1_over_rho' and 'bar_l'");
    }
    const double l1k = j.value("l1_k1_over_rho", 0.0);
    return profile_from_composite(j.at("beta").get<double>(), j.at("bar_k").get<double>(), blk,
                                  l1k);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("profile JSON schema error: ") + e.what());
  }
}

std::string profile_to_json(const LipschitzProfile& p) {
  nlohmann::json j;
  if (p.has_raw) {
    j["l1"] = p.l1;
    j["k1"] = p.k1;
    j["rho"] = p.rho;
    j["bar_l"] = p.bar_l;
    j["barl_small_variant"] = p.barl_small_variant;
    j["m_bound"] = p.m_bound;
  }
  j["beta"] = p.beta;
  j["bar_k"] = p.bar_k;
  j["hat_k"] = p.hat_k;
  j["bar_l_k1_over_rho"] = p.blk;
  j["l1_k1_over_rho"] = p.l1k;
  j["r_const"] = p.r_const;
  return j.dump(2);
}

}  // namespace mfg
