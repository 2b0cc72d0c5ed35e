#include "vlaser.h"

#include <cstring>
#include <new>
#include <string>

#include "core/errors.hpp"
#include "core/estimates.hpp"
#include "core/floquet.hpp"
#include "core/stability.hpp"
#include "io/config.hpp"
#include "io/runner.hpp"

struct vlaser_config {
  vlaser::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

vlaser_status fail(vlaser_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Run a callable, translating the exception hierarchy onto status codes.
template <typename F>
vlaser_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return VLASER_OK;
  } catch (const vlaser::ParseError& e) {
    return fail(VLASER_ERR_PARSE, e.what());
  } catch (const vlaser::ValidationError& e) {
    return fail(VLASER_ERR_INVALID_ARGUMENT, e.what());
  } catch (const vlaser::SolverError& e) {
    return fail(VLASER_ERR_SOLVER, e.what());
  } catch (const vlaser::IoError& e) {
    return fail(VLASER_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(VLASER_ERR_SOLVER, e.what());
  } catch (...) {
    return fail(VLASER_ERR_SOLVER, "unknown error");
  }
}

vlaser_status parse_into(const char* text_or_path, bool is_file, vlaser_config** out) {
  if (!out) return fail(VLASER_ERR_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  if (!text_or_path)
    return fail(VLASER_ERR_INVALID_ARGUMENT, "null input string");
  return guarded([&] {
    auto* handle = new vlaser_config{};
    try {
      handle->cfg = is_file ? vlaser::parse_config_file(text_or_path)
                            : vlaser::parse_config(text_or_path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

}  // namespace

extern "C" {

vlaser_config* vlaser_config_new(void) {
  return new (std::nothrow) vlaser_config{};
}

vlaser_status vlaser_config_parse_file(const char* path, vlaser_config** out) {
  return parse_into(path, true, out);
}

vlaser_status vlaser_config_parse_string(const char* text, vlaser_config** out) {
  return parse_into(text, false, out);
}

void vlaser_config_free(vlaser_config* cfg) { delete cfg; }

vlaser_status vlaser_config_set(vlaser_config* cfg, const char* key,
                                const char* value) {
  if (!cfg || !key || !value)
    return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument to vlaser_config_set");
  return guarded([&] { vlaser::set_key(cfg->cfg, key, value); });
}

vlaser_status vlaser_config_get(const vlaser_config* cfg, const char* key, char* buf,
                                size_t buf_len) {
  if (!cfg || !key || !buf || buf_len == 0)
    return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument to vlaser_config_get");
  return guarded([&] {
    const std::string v = vlaser::get_key(cfg->cfg, key);
    if (v.size() + 1 > buf_len)
      throw vlaser::ValidationError("buffer too small for value of '" +
                                    std::string(key) + "' (" +
                                    std::to_string(v.size() + 1) + " bytes needed)");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

vlaser_status vlaser_run(const vlaser_config* cfg) {
  if (!cfg) return fail(VLASER_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] { vlaser::run_and_write(cfg->cfg); });
}

vlaser_status vlaser_solve_steady(const vlaser_config* cfg, vlaser_steady_result* out) {
  if (!cfg || !out) return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.params.validate();
    const vlaser::NonLasingSolution sol = vlaser::solve_nonlasing(cfg->cfg.params);
    out->re_alpha = sol.alpha_ss.real();
    out->im_alpha = sol.alpha_ss.imag();
    out->rho_gg = sol.rho_ss(0, 0).real();
    out->rho_ee = sol.rho_ss(1, 1).real();
    out->rho_aa = sol.rho_ss(2, 2).real();
    out->re_rho_eg = sol.rho_ss(1, 0).real();
    out->im_rho_eg = sol.rho_ss(1, 0).imag();
    out->converged = sol.converged ? 1 : 0;
    out->residual = sol.residual;
    out->iterations = sol.iterations;
  });
}

vlaser_status vlaser_solve_stability(const vlaser_config* cfg,
                                     vlaser_stability_result* out) {
  if (!cfg || !out) return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.params.validate();
    const vlaser::NonLasingSolution sol = vlaser::solve_nonlasing(cfg->cfg.params);
    if (!sol.converged)
      throw vlaser::SolverError("stationary solve did not converge");
    const vlaser::StabilityResult st = vlaser::find_primary_root(sol, cfg->cfg.params);
    out->re_s0 = st.s0.real();
    out->im_s0 = st.s0.imag();
    out->unstable = st.lasing_unstable ? 1 : 0;
    out->n_roots = static_cast<int>(st.roots.size());
  });
}

vlaser_status vlaser_solve_floquet(const vlaser_config* cfg,
                                   vlaser_floquet_result* out) {
  if (!cfg || !out) return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.params.validate();
    const vlaser::FloquetSolution sol = vlaser::solve_selfconsistent(cfg->cfg.params);
    out->is_lasing = sol.is_lasing ? 1 : 0;
    out->abs_alpha_m1 = std::abs(sol.field.alpha_m1);
    out->abs_alpha_0 = std::abs(sol.field.alpha_0);
    out->abs_alpha_p1 = std::abs(sol.field.alpha_p1);
    out->omega = sol.is_lasing ? sol.field.omega : 0.0;
    out->avg_intensity = vlaser::avg_intensity(sol);
    out->converged = sol.converged ? 1 : 0;
    out->residual = sol.residual;
    out->iterations = sol.iterations;
  });
}

vlaser_status vlaser_estimates(const vlaser_config* cfg, vlaser_estimates_result* out) {
  if (!cfg || !out) return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.params.validate();
    const vlaser::EstimateReport r = vlaser::estimate_report(cfg->cfg.params);
    out->gamma_eff = r.gamma_eff;
    out->threshold_population = r.threshold_population;
    out->ac_stark_shift = r.ac_stark_shift;
    out->qualitative_threshold_n = r.qualitative_threshold_n;
  });
}

vlaser_status vlaser_threshold(const vlaser_config* cfg, double* critical_value) {
  if (!cfg || !critical_value)
    return fail(VLASER_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.params.validate();
    const vlaser::ThresholdSpec& t = cfg->cfg.threshold;
    vlaser::param_field(t.axis);
    if (!(t.lo < t.hi))
      throw vlaser::ValidationError("threshold_lo must be below threshold_hi");
    *critical_value =
        vlaser::threshold_bisect(cfg->cfg.params, t.axis, t.lo, t.hi);
  });
}

const char* vlaser_last_error(void) { return g_last_error.c_str(); }

const char* vlaser_status_name(vlaser_status s) {
  switch (s) {
    case VLASER_OK: return "VLASER_OK";
    case VLASER_ERR_INVALID_ARGUMENT: return "VLASER_ERR_INVALID_ARGUMENT";
    case VLASER_ERR_PARSE: return "VLASER_ERR_PARSE";
    case VLASER_ERR_SOLVER: return "VLASER_ERR_SOLVER";
    case VLASER_ERR_IO: return "VLASER_ERR_IO";
  }
  return "VLASER_STATUS_UNKNOWN";
}

}  // extern "C"
