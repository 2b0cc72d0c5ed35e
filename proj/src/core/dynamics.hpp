#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/algebra.hpp"
#include "core/params.hpp"

namespace vlaser {

// Instantaneous state of the coupled single-atom / coherent-field system.
struct MeanFieldState {
  Matrix3c rho = sigma(Level::g, Level::g);
  Complex alpha = 0.0;
  double t = 0.0;
};

// Triangular ramp of one named parameter: rate * t up to the turnaround time,
// then back down at the same rate, clamped at zero outside [0, 2 turnaround].
struct RampProtocol {
  std::string parameter = "omega_p";
  double rate = 0.0;        // slope per unit time
  double turnaround = 0.0;  // time of the peak

  double peak() const { return rate * turnaround; }
  double value_at(double t) const;
  void validate() const;
};

struct TrajectorySample {
  double t = 0.0;
  Complex alpha = 0.0;
  Matrix3c rho = Matrix3c::Zero();
  double drive = 0.0;  // instantaneous value of the ramped parameter
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

struct IntegrateOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double stride = 0.5;          // sampling interval for integrate()
  double invariant_tol = 1e-6;  // abort threshold for trace/Hermiticity/positivity drift
};

// Right-hand side of the mean-field equations at fixed parameters:
//   drho   = -i [H_atom + g_c (alpha* |g><e| + alpha |e><g|), rho]
//            + gamma_e D[|g><e|] rho + gamma_a D[|g><a|] rho
//   dalpha = -(i (delta_c - delta_p) + kappa/2) alpha - i N g_c rho(e,g)
void derivative(const Matrix3c& rho, Complex alpha, const PhysicalParams& p,
                Matrix3c& drho, Complex& dalpha);

// Adaptive embedded Runge-Kutta (order 7/8) integration from init.t to t_end.
// With a ramp, the named parameter follows it continuously (the value stored
// in p for that field is ignored).  Samples are stored every opts.stride plus
// the final time; state invariants are checked at every sample and violations
// beyond opts.invariant_tol abort with a diagnostic.
Trajectory integrate(const PhysicalParams& p, const MeanFieldState& init, double t_end,
                     const std::optional<RampProtocol>& ramp = {},
                     const IntegrateOptions& opts = {});

// Same integration loop, but streams every accepted step to on_step instead
// of storing a trajectory.  Invariants are checked about once per time unit.
using StepCallback = std::function<void(const MeanFieldState&)>;
MeanFieldState integrate_steps(const PhysicalParams& p, const MeanFieldState& init,
                               double t_end, const std::optional<RampProtocol>& ramp,
                               const IntegrateOptions& opts, const StepCallback& on_step);

// Mean of |alpha(t)|^2 over the trailing window of a stored trajectory
// (trapezoidal in the samples).  The window must fit inside the trajectory
// and contain at least four sample intervals.
double time_averaged_intensity(const Trajectory& traj, double window);

// Mean of |alpha(t)|^2 over [t_end - window, t_end], accumulated on the fly
// at full step resolution (no stored trajectory).
double windowed_intensity(const PhysicalParams& p, const MeanFieldState& init,
                          double t_end, double window,
                          const std::optional<RampProtocol>& ramp = {},
                          const IntegrateOptions& opts = {});

// Slow triangular ramp through the lasing transition: window-averaged
// intensities on a uniform grid of the ramped parameter, once rising and
// once falling.  Branch separation reveals bistability.
struct HysteresisResult {
  std::vector<double> grid;      // ramped-parameter values, ascending
  std::vector<double> forward;   // window-averaged |alpha|^2 on the way up
  std::vector<double> backward;  // on the way down
};
HysteresisResult run_hysteresis(const PhysicalParams& p, const RampProtocol& ramp,
                                Complex seed_alpha, int grid_count = 201,
                                double window = 0.0,  // 0: fifty cavity-detuning periods
                                const IntegrateOptions& opts = {});

}  // namespace vlaser
