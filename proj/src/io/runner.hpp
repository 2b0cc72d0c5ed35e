#pragma once

#include "io/config.hpp"
#include "io/dataset.hpp"

namespace vlaser {

// Validate the config, execute its mode, and return the result table.
// Column schemas (CSV header order) per mode:
//   estimates  gamma_eff, threshold_population, ac_stark_shift,
//              qualitative_threshold_n
//   steady     re_alpha, im_alpha, intensity, rho_gg, rho_ee, rho_aa,
//              re_rho_eg, im_rho_eg, re_rho_ag, im_rho_ag, re_rho_ae,
//              im_rho_ae, converged, residual, iterations
//   stability  re_s0, im_s0, unstable, n_roots
//   threshold  lo, hi, critical_value
//   floquet    is_lasing, abs_alpha_m1, abs_alpha_0, abs_alpha_p1, omega,
//              avg_intensity, converged, residual, iterations
//   trajectory t, re_alpha, im_alpha, intensity, rho_gg, rho_ee, rho_aa,
//              re_rho_eg, im_rho_eg, drive
//   ramp       value, forward, backward, mffm_intensity, unstable
//   sweep2d    axis1, axis2, re_s0, im_s0, unstable            (point_mode = stability)
//              axis1, axis2, is_lasing, abs_alpha1_sq, abs_alpha0_sq,
//              omega, avg_intensity                            (point_mode = floquet)
//              both column sets concatenated                   (point_mode = both)
// In sweep2d the omega cell is empty for non-lasing points, and a failed
// point keeps its axis cells but carries NaN elsewhere.  More than 10% failed
// points aborts the sweep.  Ramp rows add the harmonic-balance intensity
// (branch-tracked from the top of the grid downward) and the 0/1 instability
// flag of the stationary state at each sampled value.
Dataset run_config(const RunConfig& cfg);

// run_config + serialization to cfg.out (stdout when empty) in cfg.format.
void run_and_write(const RunConfig& cfg);

}  // namespace vlaser
