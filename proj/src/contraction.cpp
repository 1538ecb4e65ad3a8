#include "mfg/contraction.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Matrix build_A_T(const LipschitzProfile& p, int T) {
  if (T < 1) throw InputError("build_A_T: T must be >= 1");
  Matrix A(T, T);
  // Row 0 lacks the subdiagonal term because entry 0 of the flow is pinned.
  for (int j = 0; j < T - 1; ++j) A.at(0, j) = p.blk * std::pow(p.beta, j + 1);
  A.at(0, T - 1) = p.l1k * std::pow(p.beta, T);
  for (int i = 1; i < T; ++i) {
    A.at(i, i - 1) = p.hat_k;
    for (int j = i; j < T - 1; ++j) A.at(i, j) = p.blk * std::pow(p.beta, j - i + 1);
    A.at(i, T - 1) = p.l1k * std::pow(p.beta, T - i);
  }
  return A;
}

Matrix build_B_T(const LipschitzProfile& p, int T) {
  if (T < 1) throw InputError("build_B_T: T must be >= 1");
  Matrix B(T + 1, T + 1);
  for (int i = 0; i < T; ++i) B.at(i, i + 1) = p.beta;
  for (int i = 1; i <= T; ++i)
    for (int j = 0; j < i; ++j) B.at(i, j) = p.blk * std::pow(p.bar_k, i - 1 - j);
  return B;
}

namespace {

// Two-sided power iteration over an abstract nonnegative operator with an
// eps*I shift for primitivity. The Rayleigh quotient w'Av / w'v is evaluated
// with the pre-update vectors so each step costs one apply per side.
struct PowerCore {
  double radius = 0.0;
  Vec v, w;
  int iterations = 0;
};

PowerCore power_core(int n, double eps, double tol, int max_iter,
                     const std::function<void(const Vec&, Vec&)>& apply,
                     const std::function<void(const Vec&, Vec&)>& apply_t) {
  PowerCore r;
  r.v.assign(n, 1.0 / n);
  r.w.assign(n, 1.0 / n);
  Vec av(n), aw(n);
  double lam = 0.0, prev = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iter; ++it) {
    apply(r.v, av);
    apply_t(r.w, aw);
    for (int i = 0; i < n; ++i) {
      av[i] += eps * r.v[i];
      aw[i] += eps * r.w[i];
    }
    double num = 0.0, den = 0.0, n1 = 0.0, n2 = 0.0;
    for (int i = 0; i < n; ++i) {
      num += r.w[i] * av[i];
      den += r.w[i] * r.v[i];
      n1 += av[i];
      n2 += aw[i];
    }
    lam = num / den - eps;
    for (int i = 0; i < n; ++i) {
      r.v[i] = av[i] / n1;
      r.w[i] = aw[i] / n2;
    }
    if (std::fabs(lam - prev) <= tol * std::max(std::fabs(lam), 1e-300)) {
      ++it;
      break;
    }
    prev = lam;
  }
  if (it >= max_iter)
    throw NoConvergenceError("power iteration: Rayleigh estimate did not converge", lam);
  r.radius = lam;
  r.iterations = it;
  return r;
}

}  // namespace

PowerResult spectral_radius_power(const Matrix& mat, double tol, int max_iter) {
  if (mat.rows != mat.cols) throw InputError("spectral_radius_power: matrix must be square");
  if (tol <= 0) throw InputError("spectral_radius_power: tol must be positive");
  const int n = mat.rows;
  double mx = 0.0;
  for (double a : mat.a) {
    if (a < 0) throw InputError("spectral_radius_power: matrix must be nonnegative");
    mx = std::max(mx, a);
  }
  if (mx == 0.0) {
    PowerResult r;
    r.radius = 0.0;
    r.right = Vec(n, 1.0 / n);
    r.left = Vec(n, 1.0 / n);
    r.degenerate = true;
    return r;
  }
  const double eps = 1e-12 * mx;
  auto apply = [&](const Vec& x, Vec& out) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &mat.a[static_cast<size_t>(i) * n];
      for (int j = 0; j < n; ++j) s += row[j] * x[j];
      out[i] = s;
    }
  };
  auto apply_t = [&](const Vec& x, Vec& out) {
    for (int j = 0; j < n; ++j) out[j] = 0.0;
    for (int i = 0; i < n; ++i) {
      const double* row = &mat.a[static_cast<size_t>(i) * n];
      const double xi = x[i];
      for (int j = 0; j < n; ++j) out[j] += row[j] * xi;
    }
  };
  PowerCore core = power_core(n, eps, tol, max_iter, apply, apply_t);
  PowerResult r;
  r.radius = core.radius;
  r.right = std::move(core.v);
  r.left = std::move(core.w);
  r.iterations = core.iterations;
  return r;
}

namespace {

// O(T) products with A_T and its transpose. The geometric row tails are
// folded into suffix/prefix recursions.
void at_apply(const LipschitzProfile& p, int T, const Vec& v, Vec& out) {
  Vec S(T + 1, 0.0);  // S[i] = sum_{j=i..T-2} beta^{j-i} v[j]
  for (int i = T - 2; i >= 0; --i) S[i] = v[i] + p.beta * S[i + 1];
  double bp = std::pow(p.beta, T);  // beta^{T-i}
  for (int i = 0; i < T; ++i) {
    double s = p.blk * p.beta * S[i] + p.l1k * bp * v[T - 1];
    if (i >= 1) s += p.hat_k * v[i - 1];
    out[i] = s;
    bp /= p.beta;
  }
}

void at_apply_t(const LipschitzProfile& p, int T, const Vec& w, Vec& out) {
  Vec P(T);  // P[j] = sum_{i<=j} beta^{j-i} w[i]
  P[0] = w[0];
  for (int j = 1; j < T; ++j) P[j] = w[j] + p.beta * P[j - 1];
  for (int j = 0; j < T - 1; ++j) out[j] = p.hat_k * w[j + 1] + p.blk * p.beta * P[j];
  out[T - 1] = p.l1k * p.beta * P[T - 1];
}

void bt_apply(const LipschitzProfile& p, int T, const Vec& v, Vec& out) {
  const int n = T + 1;
  double Q = 0.0;  // Q at row i: sum_{j<i} barK^{i-1-j} v[j]
  for (int i = 0; i < n; ++i) {
    out[i] = p.blk * Q + (i < T ? p.beta * v[i + 1] : 0.0);
    Q = p.bar_k * Q + v[i];
  }
}

void bt_apply_t(const LipschitzProfile& p, int T, const Vec& w, Vec& out) {
  const int n = T + 1;
  double R = 0.0;  // R at column j: sum_{i>j} barK^{i-1-j} w[i]
  for (int j = n - 1; j >= 0; --j) {
    out[j] = p.blk * R + (j >= 1 ? p.beta * w[j - 1] : 0.0);
    if (j >= 1) R = p.bar_k * R + w[j];
  }
}

}  // namespace

double spectral_radius_power_AT(const LipschitzProfile& p, int T, double tol, int max_iter) {
  if (T < 1) throw InputError("spectral_radius_power_AT: T must be >= 1");
  const double mx = std::max({p.hat_k, p.blk * p.beta, p.l1k * p.beta});
  if (mx == 0.0) return 0.0;
  if (T == 1) return p.l1k * p.beta;
  const double eps = 1e-12 * mx;
  return power_core(
             T, eps, tol, max_iter,
             [&](const Vec& v, Vec& out) { at_apply(p, T, v, out); },
             [&](const Vec& w, Vec& out) { at_apply_t(p, T, w, out); })
      .radius;
}

double spectral_radius_power_BT(const LipschitzProfile& p, int T, double tol, int max_iter) {
  if (T < 1) throw InputError("spectral_radius_power_BT: T must be >= 1");
  const double mx = std::max(p.beta, p.blk);
  if (mx == 0.0) return 0.0;
  const double eps = 1e-12 * mx;
  if (p.blk == 0.0) return 0.0;  // strictly upper triangular, nilpotent
  // B_1 is the 2-cycle [[0, beta], [blk, 0]]; power iteration oscillates
  // on a periodic matrix, but the radius is available in closed form
  if (T == 1) return std::sqrt(p.beta * p.blk);
  return power_core(
             T + 1, eps, tol, max_iter,
             [&](const Vec& v, Vec& out) { bt_apply(p, T, v, out); },
             [&](const Vec& w, Vec& out) { bt_apply_t(p, T, w, out); })
      .radius;
}

namespace {

// Sturm count for the companion tridiagonal: number of eigenvalues of T_k
// strictly below k, obtained from the sign changes of the leading principal
// minors of T_k - k*I. The minors only depend on the product of the off
// diagonals (k*beta*hatK > 0), so the symmetric-tridiagonal count applies.
// Running rescaling keeps the recurrence inside double range at large T.
int sturm_count_below(const LipschitzProfile& p, int T, double k) {
  const double off2 = k * p.beta * p.hat_k;
  const double d = -p.bar_k * p.beta;
  int changes = 0;
  double Dm2 = 1.0;
  double Dm1 = d - k;
  if (Dm1 < 0.0) {
    ++changes;
  } else if (Dm1 == 0.0) {
    ++changes;
    Dm1 = -1e-300;
  }
  for (int i = 2; i <= T; ++i) {
    const double di = (i == T) ? d + p.r_const : d;
    double D = (di - k) * Dm1 - off2 * Dm2;
    if (D * Dm1 < 0.0) {
      ++changes;
    } else if (D == 0.0) {
      ++changes;
      D = (Dm1 > 0.0 ? -1e-300 : 1e-300);
    }
    Dm2 = Dm1;
    Dm1 = D;
    const double m = std::fabs(Dm1);
    if (m > 1e100 || (m > 0.0 && m < 1e-100)) {
      Dm1 /= m;
      Dm2 /= m;
    }
  }
  return changes;
}

}  // namespace

double spectral_radius_detsearch(const LipschitzProfile& p, int T, double tol) {
  if (T < 2) throw InputError("spectral_radius_detsearch: T must be >= 2");
  if (tol <= 0) throw InputError("spectral_radius_detsearch: tol must be positive");
  if (p.blk == 0.0 && p.l1k == 0.0)
    throw InputError("spectral_radius_detsearch: zero-coupling profile has no positive root");
  const double bound = gershgorin_bound(p, T);
  if (!(bound > 0.0)) throw InputError("spectral_radius_detsearch: Gershgorin bound not positive");

  const int n_scan = 4 * T;
  const double step = bound / n_scan;
  double hi = bound;
  int count_hi = sturm_count_below(p, T, hi);
  for (int i = 1; i <= n_scan; ++i) {
    double lo = bound - i * step;
    if (lo < step * 0.5) lo = std::numeric_limits<double>::min();
    const int count_lo = sturm_count_below(p, T, lo);
    if (count_lo != count_hi) {
      double a = lo, b = hi;
      while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (sturm_count_below(p, T, mid) == count_hi)
          b = mid;
        else
          a = mid;
      }
      return 0.5 * (a + b);
    }
    hi = lo;
    count_hi = count_lo;
    if (lo == std::numeric_limits<double>::min()) break;
  }
  std::ostringstream os;
  os << "spectral_radius_detsearch: no root bracket in (0, " << bound << "] with " << n_scan
     << " scan steps (T=" << T << ")";
  throw ConditionError(os.str());
}

double gershgorin_bound(const LipschitzProfile& p, int T) {
  if (T < 1) throw InputError("gershgorin_bound: T must be >= 1");
  // exact max row sum of A_T; row i has blk terms beta^1..beta^{T-1-i}
  // (row 0: up to beta^{T-1}), an l1k*beta^{T-i} tail, and hatK below row 0
  const double b = p.beta;
  double best = 0.0;
  for (int i = 0; i < T; ++i) {
    const int n_geo = (i == 0) ? T - 1 : T - 1 - i;
    double s = (i == 0) ? 0.0 : p.hat_k;
    s += p.blk * b * (1.0 - std::pow(b, n_geo)) / (1.0 - b);
    s += p.l1k * std::pow(b, T - i);
    best = std::max(best, s);
  }
  return best;
}

double horizon_independent_bound(const LipschitzProfile& p) {
  return p.bar_k + p.blk / (1.0 - p.beta);
}

AsymptoticBounds asymptotic_bounds_AT(const LipschitzProfile& p, int T) {
  if (T < 1) throw InputError("asymptotic_bounds_AT: T must be >= 1");
  AsymptoticBounds b;
  auto eval = [&](double denom) -> std::pair<bool, double> {
    const double c = std::cos(M_PI / denom);
    const double inner = p.hat_k * c * c - p.bar_k;
    if (!(inner > 0.0)) return {false, kNan};
    const double root = std::sqrt(p.hat_k * p.beta) * c + std::sqrt(inner * p.beta);
    return {true, root * root};
  };
  auto [lo_def, lo] = eval(T + 1.0);
  auto [up_def, up] = eval(2.0 * T + 1.0);
  b.lower_defined = lo_def;
  b.lower = lo;
  b.upper_defined = up_def;
  b.upper = up;
  return b;
}

double limit_bound_AT(const LipschitzProfile& p) {
  const double r = std::sqrt(p.hat_k * p.beta) + std::sqrt((p.hat_k - p.bar_k) * p.beta);
  return r * r;
}

BTBounds bounds_BT(const LipschitzProfile& p, int T) {
  if (!(p.bar_k > 0.0 && p.bar_k < 1.0)) {
    std::ostringstream os;
    os << "bounds_BT: requires 0 < barK < 1, got barK = " << p.bar_k;
    throw ConditionError(os.str());
  }
  if (T < 1) throw InputError("bounds_BT: T must be >= 1");
  BTBounds b;
  b.upper = p.bar_k * p.beta + 2.0 * std::sqrt(p.beta * p.blk);
  const double c = std::cos(M_PI / (T + 2.0));
  const double c2 = c * c;
  const double kb = p.bar_k * p.beta;
  const double q = 4.0 * kb * c2 - 2.0 * kb;
  b.lower = (2.0 * kb * c2 - kb) +
            0.5 * std::sqrt(q * q - 4.0 * (kb * kb - 4.0 * p.beta * p.blk * c2));
  return b;
}

InfiniteRadius infinite_radius(const LipschitzProfile& p) {
  if (p.beta >= 1.0) throw InputError("infinite_radius: beta must be < 1");
  InfiniteRadius r;
  r.value = p.bar_k + p.blk / (1.0 - p.beta);
  r.contractive = r.value < 1.0;
  return r;
}

std::optional<double> truncation_exponent_sup(const LipschitzProfile& p) {
  if (!(p.beta > 0.0 && p.beta < 1.0)) return std::nullopt;
  if (p.hat_k <= 0.0) return std::nullopt;
  const double excess = std::max(p.hat_k - p.bar_k, 0.0);
  const double ratio = std::sqrt(p.hat_k) / (std::sqrt(p.hat_k) + std::sqrt(excess));
  if (!(ratio > p.beta)) return std::nullopt;
  double eps_sup = 1.0 - std::log(ratio) / std::log(p.beta);
  if (eps_sup > 1.0) eps_sup = 1.0;
  if (!(eps_sup > 0.0)) return std::nullopt;
  return eps_sup;
}

CriterionEquivalence check_criterion_equivalence(const LipschitzProfile& p) {
  CriterionEquivalence r;
  const double excess_beta = (p.hat_k - p.bar_k) * p.beta;
  r.lhs_holds = p.bar_k * p.beta + 2.0 * std::sqrt(excess_beta) <= 1.0;
  r.rhs_holds = std::sqrt(p.hat_k * p.beta) + std::sqrt(excess_beta) <= 1.0;
  r.equivalent = r.lhs_holds == r.rhs_holds;
  return r;
}

ContractionReport contraction_report(const LipschitzProfile& p, const std::vector<int>& t_list) {
  if (t_list.empty()) throw InputError("contraction_report: empty horizon list");
  for (size_t i = 1; i < t_list.size(); ++i)
    if (t_list[i] <= t_list[i - 1])
      throw InputError("contraction_report: horizon list must be strictly ascending");

  ContractionReport rep;
  rep.profile = p;
  rep.rows.reserve(t_list.size());
  const bool coupled = !(p.blk == 0.0 && p.l1k == 0.0);
  const bool bt_ok = p.bar_k > 0.0 && p.bar_k < 1.0;
  for (int T : t_list) {
    ContractionRow row;
    row.T = T;
    row.rho_AT_power = spectral_radius_power_AT(p, T, 1e-12, 10000000);
    row.rho_AT_detsearch =
        (T >= 2 && coupled) ? spectral_radius_detsearch(p, T, 1e-13) : row.rho_AT_power;
    row.gershgorin_T = gershgorin_bound(p, T);
    const AsymptoticBounds ab = asymptotic_bounds_AT(p, T);
    row.asymptotic_lower_T = ab.lower_defined ? ab.lower : kNan;
    row.asymptotic_upper_T = ab.upper_defined ? ab.upper : kNan;
    row.rho_BT = spectral_radius_power_BT(p, T, 1e-12, 10000000);
    row.bt_upper = bt_ok ? bounds_BT(p, T).upper : kNan;
    rep.rows.push_back(row);
  }
  rep.infinite_radius_value = infinite_radius(p).value;
  rep.limit_bound = limit_bound_AT(p);
  rep.truncation_exponent_sup = truncation_exponent_sup(p);
  const CriterionEquivalence eq = check_criterion_equivalence(p);
  rep.criterion_lhs_holds = eq.lhs_holds;
  rep.criterion_rhs_holds = eq.rhs_holds;

  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const ContractionRow& row = rep.rows[i];
    if (row.rho_AT_power > row.gershgorin_T + 1e-9) {
      std::ostringstream os;
      os << "contraction_report: rho(A_" << row.T << ") = " << row.rho_AT_power
         << " exceeds its Gershgorin bound " << row.gershgorin_T;
      throw InternalError(os.str());
    }
    if (i > 0 && row.rho_AT_power < rep.rows[i - 1].rho_AT_power - 1e-10) {
      std::ostringstream os;
      os << "contraction_report: rho(A_T) not nondecreasing at T = " << row.T;
      throw InternalError(os.str());
    }
  }
  return rep;
}

std::string report_to_json(const ContractionReport& r) {
  nlohmann::json j;
  j["profile"] = nlohmann::json::parse(profile_to_json(r.profile));
  nlohmann::json rows = nlohmann::json::array();
  auto num = [](double v) {
    return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
  };
  for (const ContractionRow& row : r.rows) {
    rows.push_back({{"T", row.T},
                    {"rho_AT_power", row.rho_AT_power},
                    {"rho_AT_detsearch", row.rho_AT_detsearch},
                    {"gershgorin_T", row.gershgorin_T},
                    {"asymptotic_lower_T", num(row.asymptotic_lower_T)},
                    {"asymptotic_upper_T", num(row.asymptotic_upper_T)},
                    {"rho_BT", row.rho_BT},
                    {"bt_upper", num(row.bt_upper)}});
  }
  j["rows"] = rows;
  j["infinite_radius"] = r.infinite_radius_value;
  j["limit_bound_AT"] = r.limit_bound;
  if (r.truncation_exponent_sup)
    j["truncation_exponent_sup"] = *r.truncation_exponent_sup;
  else
    j["truncation_exponent_sup"] = nullptr;
  j["criterion_lhs_holds"] = r.criterion_lhs_holds;
  j["criterion_rhs_holds"] = r.criterion_rhs_holds;
  return j.dump(2);
}

std::string report_to_csv(const ContractionReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "T,rho_power,rho_detsearch,gershgorin,asym_lower,asym_upper,rho_BT,bt_upper\n";
  for (const ContractionRow& row : r.rows) {
    os << row.T << "," << row.rho_AT_power << "," << row.rho_AT_detsearch << ","
       << row.gershgorin_T << "," << row.asymptotic_lower_T << "," << row.asymptotic_upper_T
       << "," << row.rho_BT << "," << row.bt_upper << "\n";
  }
  return os.str();
}

}  // namespace mfg
