#include "core/estimates.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace vlaser {

double gamma_eff(const PhysicalParams& p) {
  if (p.gamma_a <= 0) throw ValidationError("gamma_eff requires gamma_a > 0");
  if (p.delta_c == 0) throw ValidationError("gamma_eff requires delta_c != 0");
  const double g2 = p.g_c * p.g_c;
  return g2 * p.omega_m * p.omega_m / (p.gamma_a * p.delta_c * p.delta_c);
}

double threshold_population(const PhysicalParams& p) {
  const double ge = gamma_eff(p);
  if (ge <= 0) throw ValidationError("threshold_population requires a positive gamma_eff");
  if (p.n_atoms < 1) throw ValidationError("threshold_population requires n_atoms >= 1");
  return p.kappa / (p.n_atoms * ge);
}

double ac_stark_shift(const PhysicalParams& p) {
  if (p.delta_m == 0) throw ValidationError("ac_stark_shift requires delta_m != 0");
  return -p.omega_m * p.omega_m / (4.0 * p.delta_m);
}

double qualitative_threshold_n(const PhysicalParams& p) {
  const double ge = gamma_eff(p);
  if (ge <= 0) throw ValidationError("qualitative_threshold_n requires a positive gamma_eff");
  return std::ceil(2.0 * p.kappa / ge);
}

EstimateReport estimate_report(const PhysicalParams& p) {
  return {gamma_eff(p), threshold_population(p), ac_stark_shift(p),
          qualitative_threshold_n(p)};
}

}  // namespace vlaser
