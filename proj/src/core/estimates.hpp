#pragma once

#include "core/params.hpp"

namespace vlaser {

// Closed-form back-of-envelope quantities for the far-detuned regime
// |delta_c| >> gamma_a >> kappa, gamma_e.  These are order-of-magnitude
// guides, not solver output.
struct EstimateReport {
  double gamma_eff;                 // effective g-e pumping rate via the a leg
  double threshold_population;      // excited-state population needed to lase
  double ac_stark_shift;            // light shift of g from the g-a drive
  double qualitative_threshold_n;   // atom number where kappa = N gamma_eff / 2
};

// g_c^2 omega_m^2 / (gamma_a delta_c^2)
double gamma_eff(const PhysicalParams& p);

// kappa / (N gamma_eff): fraction of atoms that must sit in |e> at threshold.
double threshold_population(const PhysicalParams& p);

// -omega_m^2 / (4 delta_m): shift of the lasing transition due to the strong
// g-a drive (positive for red detuning).
double ac_stark_shift(const PhysicalParams& p);

// Smallest integer atom number with N gamma_eff / 2 >= kappa.
double qualitative_threshold_n(const PhysicalParams& p);

EstimateReport estimate_report(const PhysicalParams& p);

}  // namespace vlaser
