#include "core/params.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "core/errors.hpp"

namespace vlaser {

namespace {

constexpr std::array<std::pair<const char*, double PhysicalParams::*>, 10> kFields{{
    {"gamma_e", &PhysicalParams::gamma_e},
    {"gamma_a", &PhysicalParams::gamma_a},
    {"kappa", &PhysicalParams::kappa},
    {"g_c", &PhysicalParams::g_c},
    {"delta_c", &PhysicalParams::delta_c},
    {"delta_p", &PhysicalParams::delta_p},
    {"delta_m", &PhysicalParams::delta_m},
    {"omega_p", &PhysicalParams::omega_p},
    {"omega_m", &PhysicalParams::omega_m},
    {"n_atoms", &PhysicalParams::n_atoms},
}};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

void PhysicalParams::validate() const {
  for (const auto& [name, ptr] : kFields)
    require(std::isfinite(this->*ptr), std::string(name) + " must be finite");
  require(gamma_e > 0, "gamma_e must be positive");
  require(gamma_a > 0, "gamma_a must be positive");
  require(kappa > 0, "kappa must be positive");
  require(g_c > 0, "g_c must be positive");
  require(omega_p >= 0, "omega_p must be non-negative");
  require(omega_m >= 0, "omega_m must be non-negative");
  // Integer-valuedness of n_atoms is a config-boundary rule; internal scans
  // (threshold bisection, sweep axes) treat it as continuous, and n_atoms = 0
  // (empty cavity) is a meaningful limit.
  require(n_atoms >= 0, "n_atoms must be non-negative");
}

double PhysicalParams::*param_field(const std::string& name) {
  for (const auto& [key, ptr] : kFields)
    if (name == key) return ptr;
  throw ValidationError("unknown parameter '" + name + "'");
}

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [key, ptr] : kFields) v.emplace_back(key);
    return v;
  }();
  return names;
}

}  // namespace vlaser
