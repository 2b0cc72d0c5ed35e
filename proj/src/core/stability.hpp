#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/algebra.hpp"
#include "core/params.hpp"

namespace vlaser {

// Self-consistent stationary point of the coupled atom-field equations with a
// time-independent (possibly zero) field amplitude.
struct NonLasingSolution {
  Matrix3c rho_ss = Matrix3c::Zero();
  Complex alpha_ss = 0.0;
  bool converged = false;
  double residual = 0.0;  // |alpha - alpha_tilde(rho(alpha))| at the last iterate
  int iterations = 0;
};

// Damped fixed-point iteration: alternate the kernel of the single-atom
// generator at fixed alpha with the field consistency relation
//   alpha = -i N g_c <|g><e|> / (i (delta_c - delta_p) + kappa / 2).
// Non-convergence is reported through the flag, not thrown; downstream
// analysis refuses unconverged inputs.
NonLasingSolution solve_nonlasing(const PhysicalParams& p, int max_iter = 10000,
                                  double tol = 1e-10, double mix = 0.5);

// (s - L)^{-1} applied to rhs, where L is the full single-atom generator at
// the stationary field.  Throws SolverError when s is too close to an
// eigenvalue of L (the resolvent pole set).
Matrix3c resolvent_solve(Complex s, const NonLasingSolution& sol, const Matrix3c& rhs,
                         const PhysicalParams& p);

// Atomic response traces entering the field fluctuation equations:
//   X(s) = tr(|g><e| (s-L)^{-1} [|g><e|, rho_ss])
//   Y(s) = tr(|g><e| (s-L)^{-1} [|e><g|, rho_ss])
std::pair<Complex, Complex> eval_xy(Complex s, const NonLasingSolution& sol,
                                    const PhysicalParams& p);

// 2x2 coefficient matrix of the Laplace-transformed field fluctuations
// (delta alpha, delta alpha*).  Row 1 couples to (Y, X), row 2 to the
// conjugate traces; for real s the second row is the complex conjugate of
// the first.
Eigen::Matrix2cd eval_c(Complex s, const NonLasingSolution& sol, const PhysicalParams& p);

// det C(s).  Roots in the right half plane mean the stationary state is
// unstable and the system starts to lase.
Complex dispersion(Complex s, const NonLasingSolution& sol, const PhysicalParams& p);

struct StabilityResult {
  Complex s0 = 0.0;                // root with the largest real part
  std::vector<Complex> roots;      // all accepted roots, sorted by Re descending
  bool lasing_unstable = false;    // Re s0 > 0
};

// Damped Newton iteration on det C(s) from a fixed seed grid
// (Re in {-kappa, 0, kappa} x Im in {0, +-dcp, +-(dcp +- omega_m/2)}),
// plus optional caller-provided seeds.  Roots are deduplicated, checked
// against the resolvent pole set and against a residual-ratio criterion.
StabilityResult find_primary_root(const NonLasingSolution& sol, const PhysicalParams& p,
                                  const std::vector<Complex>& extra_seeds = {});

// Bisect Re s0 = 0 along one parameter axis.  The axis value is treated as
// continuous (including n_atoms).  Requires a sign change between lo and hi;
// the result is accurate to tol in the parameter.
double threshold_bisect(const PhysicalParams& p, const std::string& axis, double lo,
                        double hi, double tol = 1e-3);

// Eigenvalues of the single-atom generator at the stationary field, sorted by
// real part descending.  These are the poles of the resolvent.
Eigen::Matrix<Complex, 9, 1> liouvillian_spectrum(const NonLasingSolution& sol,
                                                  const PhysicalParams& p);

}  // namespace vlaser
