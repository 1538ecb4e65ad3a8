#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfg/prob.hpp"

namespace mfg {

// A finite mean-field game. Costs are affine in the population measure and
// transitions are mixtures modulated by it:
//   c(x,a,mu) = c0[x][a] + sum_z wc[x][a][z] * mu(z)
//   p(.|x,a,mu) = (1-eta_p) * p0[x][a] + eta_p * sum_z mu(z) * p1[x][a][z]
// This family keeps the Lipschitz constants computable in closed form while
// still coupling both cost and dynamics to the measure.
struct MFGInstance {
  int n_states = 0;
  int n_actions = 0;
  double beta = 0.0;   // discount, in [0,1)
  double tau = 1.0;    // regularization temperature; doubles as the strong-convexity modulus
  double eta_p = 0.0;  // transition coupling weight, in [0,1]

  std::vector<std::vector<double>> c0;                            // [x][a]
  std::vector<std::vector<std::vector<double>>> wc;               // [x][a][z]
  std::vector<std::vector<Vec>> p0;                               // [x][a] -> simplex over states
  std::vector<std::vector<std::vector<Vec>>> p1;                  // [x][a][z] -> simplex
  Vec mu0;                                                        // simplex over states

  // Worst-case cost magnitude: max_{x,a} (|c0| + sum_z |wc|).
  double cost_bound() const;

  // Throws InputError on any shape or simplex violation.
  void validate() const;
};

double eval_cost(const MFGInstance& inst, int x, int a, const Vec& mu);
Vec eval_transition(const MFGInstance& inst, int x, int a, const Vec& mu);

enum class ContractionTarget { finite_horizon, infinite_horizon };

// Deterministic pseudo-random instance generator. Couplings (wc, eta_p, the
// spread of transition rows and of c0) are shrunk geometrically until the
// requested contraction condition holds:
//   finite-horizon:  sqrt(hatK*beta) + sqrt((hatK-barK)*beta) < 1
//   infinite-horizon: barK + K1*barL/(rho*(1-beta)) < 1
// Throws if the condition is still unmet after the shrink budget.
MFGInstance make_contractive_instance(int n, int m, std::uint64_t seed, ContractionTarget target);

// Copy with each c0 entry shifted by +-delta, sign alternating over the
// (x, a) grid. A uniform shift cancels exactly in the softmax policies, so
// the alternation is what makes a cost perturbation observable.
MFGInstance perturb_cost(const MFGInstance& inst, double delta);

// JSON round trip for the on-disk instance format (keys: n_states, n_actions,
// beta, tau, eta_p, c0, wc, p0, p1, mu0).
MFGInstance instance_from_json(const std::string& text);
std::string instance_to_json(const MFGInstance& inst);

}  // namespace mfg
