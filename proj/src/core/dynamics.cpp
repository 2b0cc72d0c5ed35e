#include "core/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint/algebra/array_algebra.hpp>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "core/errors.hpp"

namespace vlaser {

namespace ode = boost::numeric::odeint;

namespace {

// Flat integrator state: the density matrix column-major as 9 complex
// numbers (interleaved re/im), then the field amplitude.
using StateArr = std::array<double, 20>;

Complex* rho_of(StateArr& x) { return reinterpret_cast<Complex*>(x.data()); }
const Complex* rho_of(const StateArr& x) { return reinterpret_cast<const Complex*>(x.data()); }
Complex& alpha_of(StateArr& x) { return reinterpret_cast<Complex*>(x.data())[9]; }
Complex alpha_of(const StateArr& x) { return reinterpret_cast<const Complex*>(x.data())[9]; }

StateArr pack(const MeanFieldState& s) {
  StateArr x;
  Complex* r = rho_of(x);
  for (int c = 0; c < 3; ++c)
    for (int row = 0; row < 3; ++row) r[3 * c + row] = s.rho(row, c);
  alpha_of(x) = s.alpha;
  return x;
}

MeanFieldState unpack(const StateArr& x, double t) {
  MeanFieldState s;
  const Complex* r = rho_of(x);
  for (int c = 0; c < 3; ++c)
    for (int row = 0; row < 3; ++row) s.rho(row, c) = r[3 * c + row];
  s.alpha = alpha_of(x);
  s.t = t;
  return s;
}

// Hand-unrolled commutator + decay + field equation.  This sits in the inner
// loop of multi-minute ramps, so no Eigen temporaries here.
struct Rhs {
  PhysicalParams p;
  double PhysicalParams::*ramp_field = nullptr;
  const RampProtocol* ramp = nullptr;

  void operator()(const StateArr& x, StateArr& dxdt, double t) {
    if (ramp) p.*ramp_field = ramp->value_at(t);
    const Complex* r = rho_of(x);
    Complex* dr = rho_of(dxdt);
    const Complex alpha = alpha_of(x);

    const Complex h01 = 0.5 * p.omega_p + p.g_c * std::conj(alpha);
    const Complex h10 = std::conj(h01);
    const double h02 = 0.5 * p.omega_m;  // real; h20 == h02
    const double h11 = -p.delta_p;
    const double h22 = -p.delta_m;

    Complex hr[9], rh[9];
    for (int j = 0; j < 3; ++j) {
      const int b = 3 * j;
      hr[b + 0] = h01 * r[b + 1] + h02 * r[b + 2];
      hr[b + 1] = h10 * r[b + 0] + h11 * r[b + 1];
      hr[b + 2] = h02 * r[b + 0] + h22 * r[b + 2];
    }
    for (int i = 0; i < 3; ++i) {
      rh[0 + i] = r[3 + i] * h10 + r[6 + i] * h02;
      rh[3 + i] = r[0 + i] * h01 + r[3 + i] * h11;
      rh[6 + i] = r[0 + i] * h02 + r[6 + i] * h22;
    }
    for (int k = 0; k < 9; ++k) dr[k] = -kImag * (hr[k] - rh[k]);

    const double ge = p.gamma_e, ga = p.gamma_a;
    dr[0] += ge * r[4] + ga * r[8];
    dr[1] -= 0.5 * ge * r[1];
    dr[3] -= 0.5 * ge * r[3];
    dr[4] -= ge * r[4];
    dr[2] -= 0.5 * ga * r[2];
    dr[6] -= 0.5 * ga * r[6];
    dr[8] -= ga * r[8];
    dr[5] -= 0.5 * (ge + ga) * r[5];
    dr[7] -= 0.5 * (ge + ga) * r[7];

    alpha_of(dxdt) = -Complex(0.5 * p.kappa, p.delta_c_prime()) * alpha -
                     kImag * (p.n_atoms * p.g_c) * r[1];
  }
};

void check_invariants(const StateArr& x, double t, double tol) {
  const Complex* r = rho_of(x);
  const double trace_dev = std::abs(Complex(r[0] + r[4] + r[8]) - Complex(1.0));
  double herm_dev = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int row = 0; row < c; ++row)
      herm_dev = std::max(herm_dev, std::abs(r[3 * c + row] - std::conj(r[3 * row + c])));
  Eigen::Matrix3cd rho;
  for (int c = 0; c < 3; ++c)
    for (int row = 0; row < 3; ++row) rho(row, c) = r[3 * c + row];
  const double eig_min =
      Eigen::SelfAdjointEigenSolver<Matrix3c>(0.5 * (rho + rho.adjoint()))
          .eigenvalues()
          .minCoeff();
  if (trace_dev > tol || herm_dev > tol || eig_min < -tol) {
    std::ostringstream os;
    os << "state left the physical manifold at t = " << t << ": |tr-1| = " << trace_dev
       << ", hermiticity deviation = " << herm_dev << ", min eigenvalue = " << eig_min;
    throw SolverError(os.str());
  }
}

struct LoopCallbacks {
  // called after every accepted step
  std::function<void(double t, const StateArr&)> on_step;
  // strictly increasing stop times the stepper must land on exactly
  std::vector<double> stops;
};

// Core adaptive loop shared by all entry points.  Returns the final state.
StateArr drive_loop(const Rhs& rhs_proto, const StateArr& x0, double t0, double t_end,
                    const IntegrateOptions& opts, const LoopCallbacks& cb) {
  if (!(t_end > t0)) throw ValidationError("integration requires t_end > start time");
  if (opts.rel_tol <= 0 || opts.abs_tol <= 0)
    throw ValidationError("integration tolerances must be positive");

  using Stepper =
      ode::runge_kutta_fehlberg78<StateArr, double, StateArr, double, ode::array_algebra>;
  auto ctrl = ode::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());

  Rhs rhs = rhs_proto;
  auto system = [&rhs](const StateArr& x, StateArr& dxdt, double t) { rhs(x, dxdt, t); };

  StateArr x = x0;
  double t = t0;
  double dt = std::min(1e-3, t_end - t0);
  std::size_t stop_idx = 0;
  const double t_eps = 1e-9 * std::max(1.0, std::abs(t_end));

  while (t < t_end - t_eps) {
    while (stop_idx < cb.stops.size() && cb.stops[stop_idx] <= t + t_eps) ++stop_idx;
    const double stop =
        stop_idx < cb.stops.size() ? std::min(cb.stops[stop_idx], t_end) : t_end;
    double dt_try = std::min(dt, stop - t);
    const auto result = ctrl.try_step(system, x, t, dt_try);
    if (result == ode::success) {
      dt = dt_try;  // suggestion for the next step
      if (cb.on_step) cb.on_step(t, x);
    } else {
      dt = dt_try;
      if (dt < 1e-13 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "step size underflow at t = " << t << " (dt = " << dt
           << "); the requested tolerances cannot be met";
        throw SolverError(os.str());
      }
    }
  }
  return x;
}

Rhs make_rhs(const PhysicalParams& p, const std::optional<RampProtocol>& ramp) {
  p.validate();
  Rhs rhs;
  rhs.p = p;
  if (ramp) {
    ramp->validate();
    rhs.ramp_field = param_field(ramp->parameter);
    rhs.ramp = &*ramp;
    rhs.p.*rhs.ramp_field = ramp->value_at(0.0);
  }
  return rhs;
}

double current_drive(const Rhs& rhs, double t) {
  if (rhs.ramp) return rhs.ramp->value_at(t);
  return rhs.p.omega_p;
}

// Accumulates the integral of |alpha|^2 over fixed windows from the stream of
// accepted steps, interpolating linearly inside a step.
struct Window {
  double t0 = 0.0, t1 = 0.0;
  int tag = 0;  // caller-defined routing label
  double integral = 0.0;
  double value = 0.0;
  bool instantaneous = false;
  bool done = false;
};

class WindowSet {
 public:
  explicit WindowSet(std::vector<Window> windows) : windows_(std::move(windows)) {
    std::sort(windows_.begin(), windows_.end(),
              [](const Window& a, const Window& b) { return a.t0 < b.t0; });
  }

  void start(double t, double intensity) {
    prev_t_ = t;
    prev_i_ = intensity;
    // windows that degenerate onto the start time take the initial value
    for (auto& w : windows_) {
      if (!w.done && w.t1 <= t + 1e-12) {
        w.value = intensity;
        w.instantaneous = true;
        w.done = true;
      }
    }
  }

  void feed(double t, double intensity) {
    const double ta = prev_t_, ia = prev_i_;
    const double tb = t, ib = intensity;
    prev_t_ = tb;
    prev_i_ = ib;
    if (tb <= ta) return;
    while (first_ < windows_.size() && windows_[first_].t1 <= ta) {
      finalize(windows_[first_]);
      ++first_;
    }
    for (std::size_t k = first_; k < windows_.size() && windows_[k].t0 < tb; ++k) {
      Window& w = windows_[k];
      if (w.done) continue;
      if (w.t1 - w.t0 < 1e-12) {
        if (w.t1 >= ta && w.t1 <= tb) {
          w.value = lerp(ta, ia, tb, ib, w.t1);
          w.instantaneous = true;
          w.done = true;
        }
        continue;
      }
      const double x0 = std::max(ta, w.t0), x1 = std::min(tb, w.t1);
      if (x1 > x0) {
        const double i0 = lerp(ta, ia, tb, ib, x0);
        const double i1 = lerp(ta, ia, tb, ib, x1);
        w.integral += 0.5 * (i0 + i1) * (x1 - x0);
      }
    }
  }

  std::vector<Window> finish() {
    for (auto& w : windows_) finalize(w);
    return windows_;
  }

 private:
  static double lerp(double ta, double ia, double tb, double ib, double x) {
    if (tb == ta) return ia;
    return ia + (ib - ia) * (x - ta) / (tb - ta);
  }

  void finalize(Window& w) {
    if (w.done) return;
    if (!w.instantaneous && w.t1 - w.t0 >= 1e-12) w.value = w.integral / (w.t1 - w.t0);
    w.done = true;
  }

  std::vector<Window> windows_;
  std::size_t first_ = 0;
  double prev_t_ = 0.0, prev_i_ = 0.0;
};

}  // namespace

double RampProtocol::value_at(double t) const {
  const double v = t <= turnaround ? rate * t : rate * (2.0 * turnaround - t);
  return std::max(v, 0.0);
}

void RampProtocol::validate() const {
  param_field(parameter);  // throws for unknown names
  if (!(rate > 0) || !std::isfinite(rate))
    throw ValidationError("ramp rate must be positive and finite");
  if (!(turnaround > 0) || !std::isfinite(turnaround))
    throw ValidationError("ramp turnaround time must be positive and finite");
}

void derivative(const Matrix3c& rho, Complex alpha, const PhysicalParams& p,
                Matrix3c& drho, Complex& dalpha) {
  p.validate();
  MeanFieldState s;
  s.rho = rho;
  s.alpha = alpha;
  StateArr x = pack(s), dxdt{};
  Rhs rhs;
  rhs.p = p;
  rhs(x, dxdt, 0.0);
  const MeanFieldState d = unpack(dxdt, 0.0);
  drho = d.rho;
  dalpha = d.alpha;
}

Trajectory integrate(const PhysicalParams& p, const MeanFieldState& init, double t_end,
                     const std::optional<RampProtocol>& ramp, const IntegrateOptions& opts) {
  if (!(opts.stride > 0)) throw ValidationError("sample stride must be positive");
  Rhs rhs = make_rhs(p, ramp);

  StateArr x0 = pack(init);
  check_invariants(x0, init.t, opts.invariant_tol);

  Trajectory traj;
  auto emit = [&](double t, const StateArr& x) {
    if (!traj.samples.empty() && t - traj.samples.back().t < 1e-12 * std::max(1.0, t))
      return;  // stop times can coincide (ramp kink on a stride multiple)
    check_invariants(x, t, opts.invariant_tol);
    TrajectorySample s;
    const MeanFieldState ms = unpack(x, t);
    s.t = t;
    s.alpha = ms.alpha;
    s.rho = ms.rho;
    s.drive = current_drive(rhs, t);
    traj.samples.push_back(s);
  };
  emit(init.t, x0);

  LoopCallbacks cb;
  const double span = t_end - init.t;
  const auto n_samples = static_cast<std::size_t>(std::floor(span / opts.stride));
  for (std::size_t k = 1; k <= n_samples; ++k) cb.stops.push_back(init.t + k * opts.stride);
  if (ramp) {
    cb.stops.push_back(ramp->turnaround);
    cb.stops.push_back(2.0 * ramp->turnaround);
    std::sort(cb.stops.begin(), cb.stops.end());
  }

  std::size_t next_sample = 0;
  const double t_eps = 1e-9 * std::max(1.0, std::abs(t_end));
  auto sample_times = cb.stops;  // copy before the loop mutates nothing; stops reused
  cb.on_step = [&](double t, const StateArr& x) {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t + t_eps) {
      // stepping landed exactly on the stop (ramp kinks are stops too but only
      // stride multiples and t_end become samples)
      const double ts = sample_times[next_sample];
      const bool is_stride =
          std::abs(std::remainder(ts - init.t, opts.stride)) < 1e-6 * opts.stride;
      if (is_stride) emit(t, x);
      ++next_sample;
    }
  };

  const StateArr xf = drive_loop(rhs, x0, init.t, t_end, opts, cb);
  if (traj.samples.empty() || traj.samples.back().t < t_end - t_eps) emit(t_end, xf);
  return traj;
}

MeanFieldState integrate_steps(const PhysicalParams& p, const MeanFieldState& init,
                               double t_end, const std::optional<RampProtocol>& ramp,
                               const IntegrateOptions& opts, const StepCallback& on_step) {
  Rhs rhs = make_rhs(p, ramp);
  StateArr x0 = pack(init);
  check_invariants(x0, init.t, opts.invariant_tol);

  LoopCallbacks cb;
  if (ramp) cb.stops = {ramp->turnaround, 2.0 * ramp->turnaround};

  double next_check = init.t + 1.0;
  cb.on_step = [&](double t, const StateArr& x) {
    if (t >= next_check) {
      check_invariants(x, t, opts.invariant_tol);
      next_check = t + 1.0;
    }
    if (on_step) on_step(unpack(x, t));
  };

  const StateArr xf = drive_loop(rhs, x0, init.t, t_end, opts, cb);
  check_invariants(xf, t_end, opts.invariant_tol);
  return unpack(xf, t_end);
}

double time_averaged_intensity(const Trajectory& traj, double window) {
  if (traj.samples.size() < 2)
    throw ValidationError("time averaging requires at least two samples");
  if (!(window > 0)) throw ValidationError("averaging window must be positive");
  const double t_end = traj.samples.back().t;
  const double t_start = t_end - window;
  if (t_start < traj.samples.front().t - 1e-9)
    throw ValidationError("averaging window is longer than the trajectory");

  // first sample at or after t_start
  auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), t_start,
                             [](const TrajectorySample& s, double t) { return s.t < t; });
  const auto n_inside = static_cast<std::size_t>(traj.samples.end() - it);
  if (n_inside < 5)
    throw ValidationError("averaging window contains fewer than four sample intervals");

  auto intensity = [](const TrajectorySample& s) { return std::norm(s.alpha); };
  double integral = 0.0;
  // partial segment from t_start into the first full sample
  if (it != traj.samples.begin() && it->t > t_start + 1e-15) {
    const auto& a = *(it - 1);
    const auto& b = *it;
    const double f = (t_start - a.t) / (b.t - a.t);
    const double i_start = intensity(a) + f * (intensity(b) - intensity(a));
    integral += 0.5 * (i_start + intensity(b)) * (b.t - t_start);
  }
  for (auto jt = it; jt + 1 != traj.samples.end(); ++jt)
    integral += 0.5 * (intensity(*jt) + intensity(*(jt + 1))) * ((jt + 1)->t - jt->t);
  return integral / window;
}

double windowed_intensity(const PhysicalParams& p, const MeanFieldState& init,
                          double t_end, double window,
                          const std::optional<RampProtocol>& ramp,
                          const IntegrateOptions& opts) {
  if (!(window > 0)) throw ValidationError("averaging window must be positive");
  if (t_end - window < init.t - 1e-9)
    throw ValidationError("averaging window is longer than the integration span");
  Window w;
  w.t0 = std::max(t_end - window, init.t);
  w.t1 = t_end;
  WindowSet ws({w});
  ws.start(init.t, std::norm(init.alpha));
  integrate_steps(p, init, t_end, ramp, opts,
                  [&](const MeanFieldState& s) { ws.feed(s.t, std::norm(s.alpha)); });
  return ws.finish().front().value;
}

HysteresisResult run_hysteresis(const PhysicalParams& p, const RampProtocol& ramp,
                                Complex seed_alpha, int grid_count, double window,
                                const IntegrateOptions& opts) {
  p.validate();
  ramp.validate();
  if (grid_count < 2) throw ValidationError("hysteresis grid needs at least two points");
  if (window == 0.0) {
    const double dcp = std::abs(p.delta_c_prime());
    if (dcp <= 0)
      throw ValidationError("automatic window needs a nonzero cavity detuning");
    window = 50.0 * 2.0 * std::numbers::pi / dcp;
  }
  if (!(window > 0)) throw ValidationError("averaging window must be positive");
  const double peak = ramp.peak();
  const double spacing_t = ramp.turnaround / (grid_count - 1);
  if (window > spacing_t)
    throw ValidationError("averaging window overlaps adjacent grid points; coarsen the grid");

  // forward windows trail the rising ramp, backward windows the falling one;
  // the tag encodes branch and grid index for routing afterwards
  std::vector<Window> wins;
  const double t_total = 2.0 * ramp.turnaround;
  for (int k = 0; k < grid_count; ++k) {
    const double v = peak * k / (grid_count - 1);
    Window fw;
    fw.t1 = v / ramp.rate;
    fw.t0 = std::max(0.0, fw.t1 - window);
    fw.tag = k;
    wins.push_back(fw);
    Window bw;
    bw.t1 = t_total - v / ramp.rate;
    bw.t0 = std::max(0.0, bw.t1 - window);
    bw.tag = grid_count + k;
    wins.push_back(bw);
  }

  WindowSet ws(std::move(wins));
  MeanFieldState init;
  init.alpha = seed_alpha;
  ws.start(0.0, std::norm(seed_alpha));
  integrate_steps(p, init, t_total, ramp, opts,
                  [&](const MeanFieldState& s) { ws.feed(s.t, std::norm(s.alpha)); });

  HysteresisResult result;
  result.grid.resize(grid_count);
  result.forward.resize(grid_count);
  result.backward.resize(grid_count);
  for (int k = 0; k < grid_count; ++k)
    result.grid[k] = peak * k / (grid_count - 1);
  for (const Window& w : ws.finish()) {
    if (w.tag < grid_count)
      result.forward[w.tag] = w.value;
    else
      result.backward[w.tag - grid_count] = w.value;
  }
  return result;
}

}  // namespace vlaser
