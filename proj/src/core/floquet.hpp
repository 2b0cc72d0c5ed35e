#pragma once

#include <array>
#include <optional>

#include "core/algebra.hpp"
#include "core/params.hpp"

namespace vlaser {

// Three-harmonic ansatz for the periodic lasing state:
//   alpha(t) = sum_n alpha_n e^{i n omega t},  n in {-1, 0, +1},
// with the matching decomposition of the single-atom state.  The lasing
// emission lives in the n = +1 harmonic by convention; its phase is the
// broken U(1) gauge freedom and is fixed to alpha_p1 real >= 0.
struct FloquetField {
  Complex alpha_m1 = 0.0;
  Complex alpha_0 = 0.0;
  Complex alpha_p1 = 0.0;
  double omega = 0.0;
};

struct FloquetDensity {
  Matrix3c rho_m1 = Matrix3c::Zero();
  Matrix3c rho_0 = Matrix3c::Zero();
  Matrix3c rho_p1 = Matrix3c::Zero();
};

struct FloquetSolution {
  FloquetField field;
  FloquetDensity density;
  bool is_lasing = false;   // |alpha_p1| above the seed-scale cut of 1e-3
  bool converged = false;
  double residual = 0.0;    // F at the returned field
  int iterations = 0;
  int start_index = -1;     // multistart slot that produced the solution
};

// 27x27 harmonic-space generator acting on (rho_-1, rho_0, rho_+1); its
// kernel contains the periodic steady state.  Row n reads
//   (i n omega - L_0) rho_n - L_{+1} rho_{n-1} - L_{-1} rho_{n+1} = 0
// with L_0 the generator at alpha_0 and L_{+-1} the sideband couplings.
Eigen::MatrixXcd block_liouvillian(const FloquetField& f, const PhysicalParams& p);

// Kernel vector of the block generator, normalized to tr rho_0 = 1.
// The kernel is one-dimensional for a physical field; degeneracy throws.
FloquetDensity steady_kernel(const Eigen::MatrixXcd& block);

// Cavity response to each atomic harmonic:
//   alpha_n~ = -i N g_c tr(|g><e| rho_n) / (i (dcp + n omega) + kappa / 2)
std::array<Complex, 3> field_update(const FloquetDensity& d, const FloquetField& f,
                                    const PhysicalParams& p);

// Scalar self-consistency defect: sum of |alpha_n - alpha_n~|^2 over the
// three harmonics at fixed omega.
double residual_f(const FloquetField& f, const PhysicalParams& p);

// Damped quasi-Newton on the gauge-fixed unknowns
//   (Re alpha_-1, Im alpha_-1, Re alpha_0, Im alpha_0, alpha_+1 real, omega),
// multistarted from the stationary solution with seed amplitudes {50, 10, 1}
// and seed frequencies {-dcp, +dcp}.  Starts that collapse to |alpha_p1| <
// 1e-3 classify as non-lasing; the first lasing start in the fixed order
// wins.  If no start produces a lasing solution the trivial branch
// (0, alpha_ss, 0) is returned with is_lasing = false.
FloquetSolution solve_selfconsistent(const PhysicalParams& p,
                                     const std::optional<FloquetField>& seed = {});

// Cycle-averaged field intensity sum_n |alpha_n|^2.
double avg_intensity(const FloquetSolution& sol);

}  // namespace vlaser
