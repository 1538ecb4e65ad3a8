#include "mfg/prob.hpp"

#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

bool is_simplex(const Vec& v) {
  if (v.empty()) return false;
  double s = 0.0;
  for (double w : v) {
    if (!(w >= 0.0)) return false;  // also rejects NaN
    s += w;
  }
  return std::fabs(s - 1.0) <= kSimplexTol;
}

void validate_simplex(const Vec& v, const char* what) {
  if (is_simplex(v)) return;
  double s = 0.0;
  for (double w : v) s += w;
  std::ostringstream os;
  os << what << ": not a probability vector (size " << v.size() << ", sum " << s << ")";
  throw InputError(os.str());
}

double tv_distance(const Vec& mu, const Vec& nu) {
  if (mu.size() != nu.size())
    throw InputError("tv_distance: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) s += std::fabs(mu[i] - nu[i]);
  return 0.5 * s;
}

Vec uniform_vec(int n) { return Vec(n, 1.0 / n); }

Vec delta_vec(int n, int z) {
  Vec v(n, 0.0);
  v[z] = 1.0;
  return v;
}

}  // namespace mfg
