#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/profile.hpp"

namespace mfg {

// Minimal dense row-major matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

// The T x T matrix bounding, componentwise, how the fixed-point operator
// propagates TV gaps of measure flows.
Matrix build_A_T(const LipschitzProfile& p, int T);

// The (T+1) x (T+1) matrix bounding sup-norm gaps of Q flows.
Matrix build_B_T(const LipschitzProfile& p, int T);

struct PowerResult {
  double radius = 0.0;
  Vec right;  // l1-normalized Perron right eigenvector
  Vec left;   // l1-normalized Perron left eigenvector
  int iterations = 0;
  bool degenerate = false;  // zero matrix
};

// Two-sided power iteration on (mat + eps*I), eps = 1e-12 * max entry, with a
// Rayleigh-quotient radius estimate. Throws NoConvergenceError past max_iter.
PowerResult spectral_radius_power(const Matrix& mat, double tol, int max_iter);

// Power iteration specialized to A_T / B_T using O(T) structured
// matrix-vector products (the matrices have geometric rows); same algorithm
// and tolerances as the dense version.
double spectral_radius_power_AT(const LipschitzProfile& p, int T, double tol, int max_iter);
double spectral_radius_power_BT(const LipschitzProfile& p, int T, double tol, int max_iter);

// Largest k with det(T_k - k*I) = 0 for the companion tridiagonal matrix
// (diagonal -barK*beta, last diagonal entry -barK*beta + r_const,
// superdiagonal k*beta, subdiagonal hatK), located by a downward bracket scan
// from the Gershgorin bound in steps of bound/(4T) and bisection to tol.
// Bracket detection uses the full sign sequence of the determinant recurrence
// (a Sturm count of eigenvalues of T_k below k), so brackets containing an
// even number of crossings of the plain determinant are still caught.
// Requires T >= 2 and nonzero coupling.
double spectral_radius_detsearch(const LipschitzProfile& p, int T, double tol);

// Row-sum (Gershgorin) bound on rho(A_T) and its horizon-independent form.
double gershgorin_bound(const LipschitzProfile& p, int T);
double horizon_independent_bound(const LipschitzProfile& p);

struct AsymptoticBounds {
  bool lower_defined = false;  // requires hatK*cos^2(pi/(T+1)) - barK > 0
  bool upper_defined = false;  // requires hatK*cos^2(pi/(2T+1)) - barK > 0
  double lower = 0.0;
  double upper = 0.0;
};
AsymptoticBounds asymptotic_bounds_AT(const LipschitzProfile& p, int T);

// Large-T limit (sqrt(hatK*beta) + sqrt((hatK-barK)*beta))^2.
double limit_bound_AT(const LipschitzProfile& p);

struct BTBounds {
  double lower = 0.0;
  double upper = 0.0;  // barK*beta + 2*sqrt(beta*barL*K1/rho)
};
// Requires 0 < barK < 1 (ConditionError otherwise).
BTBounds bounds_BT(const LipschitzProfile& p, int T);

struct InfiniteRadius {
  double value = 0.0;  // barK + barL*K1/(rho*(1-beta))
  bool contractive = false;
};
InfiniteRadius infinite_radius(const LipschitzProfile& p);

// Supremum of admissible exponents for the truncation-error assumption:
// with ratio = sqrt(hatK)/(sqrt(hatK)+sqrt(hatK-barK)), the assumption is
// satisfiable iff ratio > beta, and then every epsilon strictly below
// 1 - ln(ratio)/ln(beta) (clamped to (0,1)) is a witness.
std::optional<double> truncation_exponent_sup(const LipschitzProfile& p);

struct CriterionEquivalence {
  bool lhs_holds = false;  // barK*beta + 2*sqrt((hatK-barK)*beta) <= 1
  bool rhs_holds = false;  // sqrt(hatK*beta) + sqrt((hatK-barK)*beta) <= 1
  bool equivalent = false;
};
CriterionEquivalence check_criterion_equivalence(const LipschitzProfile& p);

struct ContractionRow {
  int T = 0;
  double rho_AT_power = 0.0;
  double rho_AT_detsearch = 0.0;
  double gershgorin_T = 0.0;
  double asymptotic_lower_T = 0.0;  // NaN when undefined
  double asymptotic_upper_T = 0.0;  // NaN when undefined
  double rho_BT = 0.0;
  double bt_upper = 0.0;  // NaN when barK outside (0,1)
};

struct ContractionReport {
  LipschitzProfile profile;
  std::vector<ContractionRow> rows;
  double infinite_radius_value = 0.0;
  double limit_bound = 0.0;
  std::optional<double> truncation_exponent_sup;
  bool criterion_lhs_holds = false;
  bool criterion_rhs_holds = false;
};

// Fills every row and scalar; validates the report invariants (rho
// nondecreasing in T, rho <= Gershgorin + 1e-9) before returning.
ContractionReport contraction_report(const LipschitzProfile& p, const std::vector<int>& t_list);

std::string report_to_json(const ContractionReport& r);
// Columns: T, rho_power, rho_detsearch, gershgorin, asym_lower, asym_upper, rho_BT, bt_upper
std::string report_to_csv(const ContractionReport& r);

}  // namespace mfg
