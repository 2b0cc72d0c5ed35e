#include "io/runner.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/estimates.hpp"
#include "core/floquet.hpp"
#include "core/stability.hpp"

namespace vlaser {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Dataset run_estimates(const RunConfig& cfg) {
  Dataset d;
  d.mode = "estimates";
  d.columns = {"gamma_eff", "threshold_population", "ac_stark_shift",
               "qualitative_threshold_n"};
  const EstimateReport r = estimate_report(cfg.params);
  d.add_row({r.gamma_eff, r.threshold_population, r.ac_stark_shift,
             r.qualitative_threshold_n});
  return d;
}

Dataset run_steady(const RunConfig& cfg) {
  Dataset d;
  d.mode = "steady";
  d.columns = {"re_alpha", "im_alpha", "intensity", "rho_gg", "rho_ee", "rho_aa",
               "re_rho_eg", "im_rho_eg", "re_rho_ag", "im_rho_ag", "re_rho_ae",
               "im_rho_ae", "converged", "residual", "iterations"};
  const NonLasingSolution sol = solve_nonlasing(cfg.params);
  const Matrix3c& r = sol.rho_ss;
  d.add_row({sol.alpha_ss.real(), sol.alpha_ss.imag(), std::norm(sol.alpha_ss),
             r(0, 0).real(), r(1, 1).real(), r(2, 2).real(), r(1, 0).real(),
             r(1, 0).imag(), r(2, 0).real(), r(2, 0).imag(), r(2, 1).real(),
             r(2, 1).imag(), sol.converged ? 1.0 : 0.0, sol.residual,
             static_cast<double>(sol.iterations)});
  return d;
}

Dataset run_stability(const RunConfig& cfg) {
  Dataset d;
  d.mode = "stability";
  d.columns = {"re_s0", "im_s0", "unstable", "n_roots"};
  const NonLasingSolution sol = solve_nonlasing(cfg.params);
  if (!sol.converged)
    throw SolverError("stationary solve did not converge; stability is undefined");
  const StabilityResult st = find_primary_root(sol, cfg.params);
  d.add_row({st.s0.real(), st.s0.imag(), st.lasing_unstable ? 1.0 : 0.0,
             static_cast<double>(st.roots.size())});
  return d;
}

Dataset run_threshold(const RunConfig& cfg) {
  Dataset d;
  d.mode = "threshold";
  d.columns = {"lo", "hi", "critical_value"};
  const double v =
      threshold_bisect(cfg.params, cfg.threshold.axis, cfg.threshold.lo,
                       cfg.threshold.hi);
  d.add_row({cfg.threshold.lo, cfg.threshold.hi, v});
  return d;
}

Dataset run_floquet(const RunConfig& cfg) {
  Dataset d;
  d.mode = "floquet";
  d.columns = {"is_lasing", "abs_alpha_m1", "abs_alpha_0", "abs_alpha_p1", "omega",
               "avg_intensity", "converged", "residual", "iterations"};
  const FloquetSolution sol = solve_selfconsistent(cfg.params);
  d.add_row({sol.is_lasing ? 1.0 : 0.0, std::abs(sol.field.alpha_m1),
             std::abs(sol.field.alpha_0), std::abs(sol.field.alpha_p1),
             sol.is_lasing ? Cell(sol.field.omega) : Cell(), avg_intensity(sol),
             sol.converged ? 1.0 : 0.0, sol.residual,
             static_cast<double>(sol.iterations)});
  return d;
}

Dataset run_trajectory(const RunConfig& cfg) {
  Dataset d;
  d.mode = "trajectory";
  d.columns = {"t",      "re_alpha",  "im_alpha",  "intensity", "rho_gg",
               "rho_ee", "rho_aa",    "re_rho_eg", "im_rho_eg", "drive"};
  std::optional<RampProtocol> ramp;
  if (cfg.trajectory_ramped)
    ramp = RampProtocol{cfg.ramp.param, cfg.ramp.rate, cfg.ramp.time};
  IntegrateOptions opts;
  opts.stride = cfg.sample_stride;
  const Trajectory traj =
      integrate(cfg.params, MeanFieldState{}, cfg.trajectory_time, ramp, opts);
  for (const TrajectorySample& s : traj.samples)
    d.add_row({s.t, s.alpha.real(), s.alpha.imag(), std::norm(s.alpha),
               s.rho(0, 0).real(), s.rho(1, 1).real(), s.rho(2, 2).real(),
               s.rho(1, 0).real(), s.rho(1, 0).imag(), s.drive});
  return d;
}

// Ramp output carries the two dynamical branches plus, per grid value, the
// harmonic-balance intensity (tracked top-down so the lasing branch is
// followed through any bistable zone) and the linear-stability flag whose
// 0 -> 1 transition marks the threshold.
Dataset run_ramp(const RunConfig& cfg) {
  Dataset d;
  d.mode = "ramp";
  d.columns = {"value", "forward", "backward", "mffm_intensity", "unstable"};
  const RampProtocol rp{cfg.ramp.param, cfg.ramp.rate, cfg.ramp.time};
  const HysteresisResult hr =
      run_hysteresis(cfg.params, rp, Complex(cfg.ramp.seed_alpha, 0.0),
                     cfg.ramp.grid, cfg.ramp.window);

  double PhysicalParams::*field = param_field(cfg.ramp.param);
  const std::size_t n = hr.grid.size();

  std::vector<Cell> mffm(n), unstable(n);
  std::optional<FloquetField> seed;
  for (std::size_t k = n; k-- > 0;) {
    PhysicalParams p = cfg.params;
    p.*field = hr.grid[k];
    try {
      const FloquetSolution s = solve_selfconsistent(p, seed);
      seed = (s.converged && s.is_lasing) ? std::optional<FloquetField>(s.field)
                                          : std::nullopt;
      mffm[k] = Cell(avg_intensity(s));
    } catch (const std::exception&) {
      seed.reset();
      mffm[k] = Cell(kNaN);
    }
    try {
      const NonLasingSolution sol = solve_nonlasing(p);
      if (!sol.converged) throw SolverError("stationary solve did not converge");
      const StabilityResult st = find_primary_root(sol, p);
      unstable[k] = Cell(st.lasing_unstable ? 1.0 : 0.0);
    } catch (const std::exception&) {
      unstable[k] = Cell(kNaN);
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    d.add_row({hr.grid[i], hr.forward[i], hr.backward[i], mffm[i], unstable[i]});
  return d;
}

double axis_value(const AxisSpec& a, int k) {
  return a.lo + (a.hi - a.lo) * static_cast<double>(k) /
                    static_cast<double>(a.count - 1);
}

// Per-point solves shared by the sweep row kinds.  Each returns the cells it
// owns, or NaN gaps on failure.
bool stability_cells(const PhysicalParams& p, std::vector<Cell>& out) {
  try {
    const NonLasingSolution sol = solve_nonlasing(p);
    if (!sol.converged) throw SolverError("stationary solve did not converge");
    const StabilityResult st = find_primary_root(sol, p);
    out.push_back(st.s0.real());
    out.push_back(st.s0.imag());
    out.push_back(st.lasing_unstable ? 1.0 : 0.0);
    return true;
  } catch (const std::exception&) {
    out.insert(out.end(), {kNaN, kNaN, kNaN});
    return false;
  }
}

bool floquet_cells(const PhysicalParams& p, std::optional<FloquetField>& seed,
                   std::vector<Cell>& out) {
  try {
    const FloquetSolution s = solve_selfconsistent(p, seed);
    seed = (s.converged && s.is_lasing) ? std::optional<FloquetField>(s.field)
                                        : std::nullopt;
    out.push_back(s.is_lasing ? 1.0 : 0.0);
    out.push_back(std::norm(s.field.alpha_p1));
    out.push_back(std::norm(s.field.alpha_0));
    out.push_back(s.is_lasing ? Cell(s.field.omega) : Cell());
    out.push_back(avg_intensity(s));
    return true;
  } catch (const std::exception&) {
    seed.reset();
    out.insert(out.end(), {kNaN, kNaN, kNaN, kNaN, kNaN});
    return false;
  }
}

// One sweep row, left to right.  Any continuation seeding stays inside the
// row, so the result is independent of how rows are distributed over workers.
void sweep_row(const RunConfig& cfg, int i, std::vector<std::vector<Cell>>& out,
               std::atomic<int>& failures) {
  double PhysicalParams::*f1 = param_field(cfg.axis1.param);
  double PhysicalParams::*f2 = param_field(cfg.axis2.param);
  PhysicalParams base = cfg.params;
  base.*f1 = axis_value(cfg.axis1, i);
  std::optional<FloquetField> seed;
  for (int j = 0; j < cfg.axis2.count; ++j) {
    PhysicalParams p = base;
    p.*f2 = axis_value(cfg.axis2, j);
    std::vector<Cell> cells = {base.*f1, p.*f2};
    bool ok = true;
    if (cfg.point_mode != "floquet") ok = stability_cells(p, cells) && ok;
    if (cfg.point_mode != "stability") ok = floquet_cells(p, seed, cells) && ok;
    if (!ok) ++failures;
    out.push_back(std::move(cells));
  }
}

Dataset run_sweep2d(const RunConfig& cfg) {
  Dataset d;
  d.mode = "sweep2d";
  if (cfg.point_mode == "floquet")
    d.columns = {"axis1",         "axis2", "is_lasing", "abs_alpha1_sq",
                 "abs_alpha0_sq", "omega", "avg_intensity"};
  else if (cfg.point_mode == "stability")
    d.columns = {"axis1", "axis2", "re_s0", "im_s0", "unstable"};
  else
    d.columns = {"axis1",     "axis2",         "re_s0",         "im_s0",
                 "unstable",  "is_lasing",     "abs_alpha1_sq", "abs_alpha0_sq",
                 "omega",     "avg_intensity"};

  const int n1 = cfg.axis1.count;
  std::vector<std::vector<std::vector<Cell>>> per_row(n1);
  std::atomic<int> failures{0};

  const int workers = std::min(cfg.workers, n1);
  if (workers <= 1) {
    for (int i = 0; i < n1; ++i) sweep_row(cfg, i, per_row[i], failures);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < n1; i += workers)
          sweep_row(cfg, i, per_row[i], failures);
      });
    for (auto& t : pool) t.join();
  }

  const int total = n1 * cfg.axis2.count;
  if (failures.load() * 10 > total)
    throw SolverError("sweep failed at " + std::to_string(failures.load()) + " of " +
                      std::to_string(total) + " grid points");

  for (auto& row : per_row)
    for (auto& cells : row) d.add_row(std::move(cells));
  return d;
}

}  // namespace

Dataset run_config(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.mode == "estimates") return run_estimates(cfg);
  if (cfg.mode == "steady") return run_steady(cfg);
  if (cfg.mode == "stability") return run_stability(cfg);
  if (cfg.mode == "threshold") return run_threshold(cfg);
  if (cfg.mode == "floquet") return run_floquet(cfg);
  if (cfg.mode == "trajectory") return run_trajectory(cfg);
  if (cfg.mode == "ramp") return run_ramp(cfg);
  if (cfg.mode == "sweep2d") return run_sweep2d(cfg);
  throw ValidationError("unknown mode '" + cfg.mode + "'");
}

void run_and_write(const RunConfig& cfg) {
  run_config(cfg).write(cfg.out, cfg.format);
}

}  // namespace vlaser
