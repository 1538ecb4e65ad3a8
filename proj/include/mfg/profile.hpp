#pragma once

#include <string>

#include "mfg/instance.hpp"

namespace mfg {

// The Lipschitz constants that parameterize every contraction formula.
//
// Raw constants (l1, k1, rho) are present when the profile was derived from
// an instance or given explicitly; composite profiles carry only the
// products that the formulas consume:
//   blk = barL * K1 / rho   (so hatK = barK + blk)
//   l1k = L1 * K1 / rho
// Absent raw fields are NaN and has_raw is false.
struct LipschitzProfile {
  double l1 = 0.0;
  double k1 = 0.0;
  double rho = 1.0;
  double beta = 0.0;

  double bar_l = 0.0;
  double bar_k = 0.0;
  double hat_k = 0.0;
  double blk = 0.0;      // barL * K1 / rho == hatK - barK
  double l1k = 0.0;      // L1 * K1 / rho
  double r_const = 0.0;  // beta * (barK + l1k)
  double m_bound = 0.0;  // cost magnitude bound M

  bool has_raw = false;
  // When true, barL uses the smaller variant L1/(1 - beta*K1/2) instead of
  // the conservative L1*(1 + beta*K1/2)/(1 - beta*K1/2).
  bool barl_small_variant = false;

  bool zero_coupling() const { return blk == 0.0 && l1k == 0.0 && bar_k == 0.0; }
};

// Builds a profile from raw constants; requires beta*K1/2 < 1.
LipschitzProfile profile_from_raw(double l1, double k1, double beta, double rho,
                                  bool small_variant = false, double m_bound = 0.0);

// Builds a profile directly from the composite constants.
// l1k may be 0 when the source only specifies the barL coupling.
LipschitzProfile profile_from_composite(double beta, double bar_k, double blk, double l1k);

// Conservative constants from the affine instance family. Oscillations over
// the measure argument are evaluated at simplex vertices only, which is exact
// because cost and transition are affine in mu. Throws ConditionError when
// beta*K1/2 >= 1 (barL undefined).
LipschitzProfile compute_lipschitz_profile(const MFGInstance& inst, bool small_variant = false);

// JSON I/O. Accepts either raw constants {l1, k1, beta, rho} or composite
// documents {beta, bar_k, k1_over_rho, bar_l [, l1_k1_over_rho]} /
// {beta, bar_k, bar_l_k1_over_rho [, l1_k1_over_rho]}.
LipschitzProfile profile_from_json(const std::string& text);
std::string profile_to_json(const LipschitzProfile& p);

}  // namespace mfg
