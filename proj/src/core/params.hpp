#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace vlaser {

// Physical parameters of the driven three-level V system coupled to a single
// cavity mode.  All rates and frequencies are expressed in units of the
// dipole-allowed decay rate gamma_e; defaults correspond to the standard
// operating point used throughout the test suite (88Sr-like level scheme).
//
// Level ordering: g = 0 (ground), e = 1 (dipole transition, cavity-coupled),
// a = 2 (long-lived transition driven by the repump/MOT laser).
struct PhysicalParams {
  double gamma_e = 1.0;                  // decay rate e -> g (unit)
  double gamma_a = 159.0;                // decay rate a -> g
  double kappa = 0.39;                   // cavity field decay rate
  double g_c = 0.33;                     // single-atom cavity coupling on g-e
  double delta_c = -192.0;               // cavity detuning from bare g-e
  double delta_p = 0.0;                  // drive detuning on g-e
  double delta_m = -192.0;               // drive detuning on g-a
  double omega_p = std::sqrt(140.0);     // Rabi frequency of the g-e drive
  double omega_m = 79.5;                 // Rabi frequency of the g-a drive
  double n_atoms = 20000.0;              // atom number (continuous in scans)

  // Cavity detuning in the frame rotating at the g-e drive frequency.
  double delta_c_prime() const { return delta_c - delta_p; }

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Name-based access to the parameter fields, shared by the config parser,
// sweep axes, ramps and the threshold scan.  Throws ValidationError for an
// unknown name.
double PhysicalParams::*param_field(const std::string& name);
const std::vector<std::string>& param_names();

}  // namespace vlaser
