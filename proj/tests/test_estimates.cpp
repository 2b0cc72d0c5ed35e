#include <doctest.h>

#include "core/errors.hpp"
#include "core/estimates.hpp"
#include "support.hpp"

using namespace vlaser;
using namespace vlaser::testing;

TEST_CASE("effective pump rate at the standard operating point") {
  // g^2 om^2 / (ga dc^2) with g=0.33, om=79.5, ga=159, dc=-192,
  // evaluated independently and frozen.
  const PhysicalParams p = default_params();
  CHECK(gamma_eff(p) == doctest::Approx(1.174255371093750e-4).epsilon(1e-12));
}

TEST_CASE("threshold population fraction at the standard operating point") {
  const PhysicalParams p = default_params();
  CHECK(threshold_population(p) == doctest::Approx(1.660626851707469e-1).epsilon(1e-12));
  // roughly a sixth of the atoms must be excited for gain to beat cavity loss
  CHECK(threshold_population(p) > 0.1);
  CHECK(threshold_population(p) < 0.25);
}

TEST_CASE("light shift of the lasing transition") {
  const PhysicalParams p = default_params();
  CHECK(ac_stark_shift(p) == doctest::Approx(8.229492187500000).epsilon(1e-12));
  // red-detuned dressing laser pushes the transition up
  CHECK(ac_stark_shift(p) > 0.0);
}

TEST_CASE("qualitative threshold atom number") {
  const PhysicalParams p = default_params();
  CHECK(qualitative_threshold_n(p) == 6643.0);
}

TEST_CASE("estimate report bundles the individual quantities") {
  const PhysicalParams p = default_params();
  const EstimateReport r = estimate_report(p);
  CHECK(r.gamma_eff == gamma_eff(p));
  CHECK(r.threshold_population == threshold_population(p));
  CHECK(r.ac_stark_shift == ac_stark_shift(p));
  CHECK(r.qualitative_threshold_n == qualitative_threshold_n(p));
}

TEST_CASE("estimates guard against degenerate parameters") {
  PhysicalParams p = default_params();
  p.delta_c = 0.0;
  CHECK_THROWS_AS(gamma_eff(p), ValidationError);
  p = default_params();
  p.delta_m = 0.0;
  CHECK_THROWS_AS(ac_stark_shift(p), ValidationError);
}

TEST_CASE("scaling relations of the effective rate") {
  // gamma_eff is quadratic in the coupling and the dressing drive, inverse
  // quadratic in the detuning.
  PhysicalParams p = default_params();
  const double base = gamma_eff(p);
  p.g_c *= 2.0;
  CHECK(gamma_eff(p) == doctest::Approx(4.0 * base).epsilon(1e-12));
  p = default_params();
  p.omega_m *= 3.0;
  CHECK(gamma_eff(p) == doctest::Approx(9.0 * base).epsilon(1e-12));
  p = default_params();
  p.delta_c *= 2.0;
  CHECK(gamma_eff(p) == doctest::Approx(0.25 * base).epsilon(1e-12));
}
