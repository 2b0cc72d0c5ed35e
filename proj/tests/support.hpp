#pragma once

// Shared helpers for the unit and acceptance suites: seeded generators for
// property-style checks and small comparison utilities.

#include <complex>
#include <cstdint>
#include <random>

#include "core/algebra.hpp"
#include "core/params.hpp"

namespace vlaser::testing {

// All randomized checks run from fixed seeds so failures reproduce exactly.
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Complex random_complex(std::mt19937_64& g, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(g), d(g)};
}

inline Matrix3c random_matrix(std::mt19937_64& g, double scale = 1.0) {
  Matrix3c m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = random_complex(g, scale);
  return m;
}

inline Matrix3c random_hermitian(std::mt19937_64& g, double scale = 1.0) {
  const Matrix3c m = random_matrix(g, scale);
  return 0.5 * (m + m.adjoint());
}

// Random physical state: positive semi-definite with unit trace.
inline Matrix3c random_density(std::mt19937_64& g) {
  const Matrix3c m = random_matrix(g);
  Matrix3c rho = m * m.adjoint();
  rho /= rho.trace();
  return rho;
}

inline double matrix_distance(const Matrix3c& a, const Matrix3c& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double matrix_distance(const Matrix9c& a, const Matrix9c& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Default parameter set used by most physics tests (the documented standard
// operating point).
inline PhysicalParams default_params() { return PhysicalParams{}; }

}  // namespace vlaser::testing
