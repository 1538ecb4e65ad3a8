#pragma once

#include <vector>

namespace mfg {

using Vec = std::vector<double>;

// Absolute tolerance for probability-vector validation. Vectors that fail it
// are rejected, never renormalized.
inline constexpr double kSimplexTol = 1e-12;

// Throws InputError unless v is entrywise >= 0 and sums to 1 within kSimplexTol.
void validate_simplex(const Vec& v, const char* what = "probability vector");

bool is_simplex(const Vec& v);

// Total variation distance, 1/2 * l1. Throws on dimension mismatch.
double tv_distance(const Vec& mu, const Vec& nu);

// Uniform distribution on n points.
Vec uniform_vec(int n);

// Point mass at index z.
Vec delta_vec(int n, int z);

}  // namespace mfg
