#include "mfg/instance.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mfg/errors.hpp"
#include "mfg/profile.hpp"

namespace mfg {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

}  // namespace

double MFGInstance::cost_bound() const {
  double m = 0.0;
  for (int x = 0; x < n_states; ++x)
    for (int a = 0; a < n_actions; ++a) {
      double b = std::fabs(c0[x][a]);
      for (int z = 0; z < n_states; ++z) b += std::fabs(wc[x][a][z]);
      m = std::max(m, b);
    }
  return m;
}

void MFGInstance::validate() const {
  require(n_states >= 1, "n_states must be >= 1");
  require(n_actions >= 1, "n_actions must be >= 1");
  require(beta >= 0.0 && beta < 1.0, "beta must lie in [0,1)");
  require(tau > 0.0, "tau must be positive");
  require(eta_p >= 0.0 && eta_p <= 1.0, "eta_p must lie in [0,1]");
  auto dims = [&](size_t got, size_t want, const char* what) {
    if (got != want) {
      std::ostringstream os;
      os << what << ": expected " << want << " entries, got " << got;
      throw InputError(os.str());
    }
  };
  dims(c0.size(), n_states, "c0");
  dims(wc.size(), n_states, "wc");
  dims(p0.size(), n_states, "p0");
  dims(p1.size(), n_states, "p1");
  for (int x = 0; x < n_states; ++x) {
    dims(c0[x].size(), n_actions, "c0 row");
    dims(wc[x].size(), n_actions, "wc row");
    dims(p0[x].size(), n_actions, "p0 row");
    dims(p1[x].size(), n_actions, "p1 row");
    for (int a = 0; a < n_actions; ++a) {
      dims(wc[x][a].size(), n_states, "wc inner");
      validate_simplex(p0[x][a], "p0 row");
      dims(p1[x][a].size(), n_states, "p1 anchors");
      for (int z = 0; z < n_states; ++z) validate_simplex(p1[x][a][z], "p1 row");
    }
  }
  dims(mu0.size(), n_states, "mu0");
  validate_simplex(mu0, "mu0");
}

double eval_cost(const MFGInstance& inst, int x, int a, const Vec& mu) {
  if (x < 0 || x >= inst.n_states || a < 0 || a >= inst.n_actions)
    throw InputError("eval_cost: index out of range");
  if (static_cast<int>(mu.size()) != inst.n_states)
    throw InputError("eval_cost: measure dimension mismatch");
  double c = inst.c0[x][a];
  for (int z = 0; z < inst.n_states; ++z) c += inst.wc[x][a][z] * mu[z];
  return c;
}

Vec eval_transition(const MFGInstance& inst, int x, int a, const Vec& mu) {
  if (x < 0 || x >= inst.n_states || a < 0 || a >= inst.n_actions)
    throw InputError("eval_transition: index out of range");
  if (static_cast<int>(mu.size()) != inst.n_states)
    throw InputError("eval_transition: measure dimension mismatch");
  Vec out(inst.n_states, 0.0);
  const double w0 = 1.0 - inst.eta_p;
  for (int y = 0; y < inst.n_states; ++y) out[y] = w0 * inst.p0[x][a][y];
  if (inst.eta_p > 0.0) {
    for (int z = 0; z < inst.n_states; ++z) {
      if (mu[z] == 0.0) continue;
      const double w = inst.eta_p * mu[z];
      for (int y = 0; y < inst.n_states; ++y) out[y] += w * inst.p1[x][a][z][y];
    }
  }
  return out;
}

namespace {

// sharpness > 1 biases the draw toward sparse rows, which keeps the
// transition tables genuinely state/action dependent.
Vec random_simplex(std::mt19937_64& rng, int n, double sharpness = 1.0) {
  std::uniform_real_distribution<double> u(0.02, 1.0);
  Vec v(n);
  double s = 0.0;
  for (double& w : v) {
    w = std::pow(u(rng), sharpness);
    s += w;
  }
  for (double& w : v) w /= s;
  return v;
}

// Blend each transition row toward a common anchor row and damp the other
// couplings; s = 1 is the raw random draw, s -> 0 decouples the game. The
// measure couplings (wc, eta_p) shrink quadratically so the transition
// spread -- the channel that makes equilibria genuinely horizon dependent --
// is the last thing sacrificed.
MFGInstance shrink_towards(const MFGInstance& raw, const Vec& anchor,
                           const std::vector<std::vector<double>>& c0_mean, double s) {
  MFGInstance inst = raw;
  const double s2 = s * s;
  inst.eta_p = raw.eta_p * s2;
  for (int x = 0; x < inst.n_states; ++x)
    for (int a = 0; a < inst.n_actions; ++a) {
      inst.c0[x][a] = c0_mean[x][a] + s * (raw.c0[x][a] - c0_mean[x][a]);
      for (int z = 0; z < inst.n_states; ++z) {
        inst.wc[x][a][z] = s2 * raw.wc[x][a][z];
        inst.p0[x][a][z] = (1.0 - s) * anchor[z] + s * raw.p0[x][a][z];
      }
      for (int z0 = 0; z0 < inst.n_states; ++z0)
        for (int z = 0; z < inst.n_states; ++z)
          inst.p1[x][a][z0][z] = (1.0 - s) * anchor[z] + s * raw.p1[x][a][z0][z];
    }
  return inst;
}

bool meets_target(const MFGInstance& inst, ContractionTarget target) {
  LipschitzProfile p;
  try {
    p = compute_lipschitz_profile(inst);
  } catch (const Error&) {
    return false;  // barL undefined at this coupling level
  }
  if (target == ContractionTarget::finite_horizon) {
    return std::sqrt(p.hat_k * p.beta) + std::sqrt((p.hat_k - p.bar_k) * p.beta) < 1.0;
  }
  return p.bar_k + p.blk / (1.0 - p.beta) < 1.0;
}

}  // namespace

MFGInstance make_contractive_instance(int n, int m, std::uint64_t seed,
                                      ContractionTarget target) {
  if (n < 1 || m < 1) throw InputError("make_contractive_instance: n, m must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(0.0, 1.0), uw(-1.0, 1.0);

  MFGInstance raw;
  raw.n_states = n;
  raw.n_actions = m;
  raw.beta = 0.6;
  raw.tau = 1.0;
  raw.eta_p = 0.3;
  raw.c0.assign(n, std::vector<double>(m));
  raw.wc.assign(n, std::vector<std::vector<double>>(m, std::vector<double>(n)));
  raw.p0.assign(n, std::vector<Vec>(m));
  raw.p1.assign(n, std::vector<std::vector<Vec>>(m, std::vector<Vec>(n)));
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) {
      raw.c0[x][a] = uc(rng);
      for (int z = 0; z < n; ++z) raw.wc[x][a][z] = uw(rng);
      raw.p0[x][a] = random_simplex(rng, n, 3.0);
      for (int z = 0; z < n; ++z) raw.p1[x][a][z] = random_simplex(rng, n, 3.0);
    }
  raw.mu0 = random_simplex(rng, n);

  Vec anchor = random_simplex(rng, n);
  std::vector<std::vector<double>> c0_mean(n, std::vector<double>(m));
  double mean = 0.0;
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) mean += raw.c0[x][a];
  mean /= n * m;
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) c0_mean[x][a] = mean;

  double s = 1.0;
  constexpr int kMaxShrink = 120;
  for (int step = 0; step <= kMaxShrink; ++step) {
    MFGInstance inst = shrink_towards(raw, anchor, c0_mean, s);
    if (meets_target(inst, target)) {
      inst.validate();
      return inst;
    }
    s *= 0.85;
  }
  throw ConditionError("make_contractive_instance: contraction target unmet after shrink budget");
}

MFGInstance perturb_cost(const MFGInstance& inst, double delta) {
  MFGInstance out = inst;
  for (int x = 0; x < out.n_states; ++x)
    for (int a = 0; a < out.n_actions; ++a)
      out.c0[x][a] += ((x + a) % 2 == 0) ? delta : -delta;
  return out;
}

MFGInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("instance JSON parse error: ") + e.what());
  }
  MFGInstance inst;
  try {
    inst.n_states = j.at("n_states").get<int>();
    inst.n_actions = j.at("n_actions").get<int>();
    inst.beta = j.at("beta").get<double>();
    inst.tau = j.at("tau").get<double>();
    inst.eta_p = j.at("eta_p").get<double>();
    inst.c0 = j.at("c0").get<std::vector<std::vector<double>>>();
    inst.wc = j.at("wc").get<std::vector<std::vector<std::vector<double>>>>();
    inst.p0 = j.at("p0").get<std::vector<std::vector<Vec>>>();
    inst.p1 = j.at("p1").get<std::vector<std::vector<std::vector<Vec>>>>();
    inst.mu0 = j.at("mu0").get<Vec>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("instance JSON schema error: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string instance_to_json(const MFGInstance& inst) {
  nlohmann::json j;
  j["n_states"] = inst.n_states;
  j["n_actions"] = inst.n_actions;
  j["beta"] = inst.beta;
  j["tau"] = inst.tau;
  j["eta_p"] = inst.eta_p;
  j["c0"] = inst.c0;
  j["wc"] = inst.wc;
  j["p0"] = inst.p0;
  j["p1"] = inst.p1;
  j["mu0"] = inst.mu0;
  return j.dump(2);
}

}  // namespace mfg
