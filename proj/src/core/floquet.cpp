#include "core/floquet.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/stability.hpp"

namespace vlaser {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// |alpha_p1| below this is indistinguishable from the trivial branch; it also
// bounds the sideband size under which a Newton iterate is declared collapsed.
constexpr double kLasingCut = 1e-3;

// Sup-norm target for the self-consistency defect.  The achievable floor is
// set by the kernel extraction noise amplified through the near-resonant
// cavity denominator, so iterates that stall above this are still accepted
// when the scalar defect F stays below 1e-12 (1 + total intensity)^2.
constexpr double kTightTol = 1e-10;

constexpr int kMaxIter = 80;
constexpr int kStagnationWindow = 8;

FloquetField field_of(const Vec6& u) {
  FloquetField f;
  f.alpha_m1 = Complex(u[0], u[1]);
  f.alpha_0 = Complex(u[2], u[3]);
  f.alpha_p1 = Complex(u[4], 0.0);  // gauge slice: emission harmonic kept real
  f.omega = u[5];
  return f;
}

// Gauge-fixed residual vector.  Components 0..4 are the real/imaginary defects
// of the three harmonics (with alpha_p1 restricted to the real axis); the
// sixth pins the gauge by demanding the updated emission harmonic stays real,
// which is what determines omega.
Vec6 defect(const Vec6& u, const PhysicalParams& p, FloquetDensity* density_out = nullptr) {
  const FloquetField f = field_of(u);
  FloquetDensity d = steady_kernel(block_liouvillian(f, p));
  const auto tilde = field_update(d, f, p);
  if (density_out) *density_out = d;
  Vec6 r;
  r[0] = u[0] - tilde[0].real();
  r[1] = u[1] - tilde[0].imag();
  r[2] = u[2] - tilde[1].real();
  r[3] = u[3] - tilde[1].imag();
  r[4] = u[4] - tilde[2].real();
  r[5] = -tilde[2].imag();
  return r;
}

bool in_trivial_basin(const Vec6& u) {
  return std::abs(u[4]) < kLasingCut && std::abs(u[0]) < kLasingCut &&
         std::abs(u[1]) < kLasingCut;
}

struct StartResult {
  bool usable = false;     // converged tightly or accepted at the noise floor
  bool collapsed = false;  // slid onto the trivial branch
  Vec6 u = Vec6::Zero();
  FloquetDensity density;
  double fvalue = 0.0;  // scalar defect F at u
  double best_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

StartResult run_start(Vec6 u, const PhysicalParams& p) {
  StartResult out;
  Vec6 best_u = u;
  int stale = 0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    out.iterations = iter + 1;
    if (in_trivial_basin(u)) {
      out.collapsed = true;
      return out;
    }
    Vec6 r;
    try {
      r = defect(u, p);
    } catch (const SolverError&) {
      return out;  // degenerate kernel along the way: abandon this start
    }
    const double norm = r.lpNorm<Eigen::Infinity>();
    stale = (norm < 0.5 * out.best_norm) ? 0 : stale + 1;
    if (norm < out.best_norm) {
      out.best_norm = norm;
      best_u = u;
    }
    if (norm <= kTightTol || stale > kStagnationWindow) break;

    Mat6 jac;
    bool jac_ok = true;
    for (int j = 0; j < 6 && jac_ok; ++j) {
      const double h = 1e-7 * (1.0 + std::abs(u[j]));
      Vec6 up = u;
      up[j] += h;
      try {
        jac.col(j) = (defect(up, p) - r) / h;
      } catch (const SolverError&) {
        jac_ok = false;
      }
    }
    if (!jac_ok) break;

    // Minimum-norm least-squares step: near the trivial branch the omega
    // column of the Jacobian vanishes (the collapsed state has no phase to
    // rotate), and the orthogonal decomposition keeps that direction quiet
    // instead of blowing up.
    Eigen::CompleteOrthogonalDecomposition<Mat6> cod(jac);
    Vec6 step = cod.solve(-r);
    if (!step.allFinite()) break;
    const double cap = 0.25 * (1.0 + u.lpNorm<Eigen::Infinity>());
    const double length = step.lpNorm<Eigen::Infinity>();
    if (length > cap) step *= cap / length;

    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 9; ++k, lambda *= 0.5) {
      const Vec6 cand = u + lambda * step;
      double cand_norm;
      try {
        cand_norm = defect(cand, p).lpNorm<Eigen::Infinity>();
      } catch (const SolverError&) {
        continue;
      }
      if (cand_norm < norm) {
        u = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // line search stalled; judge the best iterate below
  }

  if (in_trivial_basin(best_u)) {
    out.collapsed = true;
    return out;
  }
  Vec6 r;
  FloquetDensity d;
  try {
    r = defect(best_u, p, &d);
  } catch (const SolverError&) {
    return out;
  }
  const double fval = r.squaredNorm();
  const FloquetField f = field_of(best_u);
  const double scale =
      1.0 + std::norm(f.alpha_m1) + std::norm(f.alpha_0) + std::norm(f.alpha_p1);
  if (r.lpNorm<Eigen::Infinity>() <= kTightTol || fval <= 1e-12 * scale * scale) {
    out.usable = true;
    out.u = best_u;
    out.density = d;
    out.fvalue = fval;
  }
  return out;
}

// Rotate an arbitrary seed into the gauge slice (alpha_p1 real >= 0) without
// changing the physical state: alpha_n -> alpha_n e^{i n phi}.
Vec6 canonical_seed(const FloquetField& f) {
  const double r = std::abs(f.alpha_p1);
  const Complex phase = (r > 0.0) ? f.alpha_p1 / r : Complex(1.0, 0.0);
  const Complex am1 = f.alpha_m1 * phase;  // e^{-i phi} = phase when alpha_p1 = r phase
  Vec6 u;
  u << am1.real(), am1.imag(), f.alpha_0.real(), f.alpha_0.imag(), r, f.omega;
  return u;
}

// Trace-normalized kernel of the 9x9 generator at fixed alpha, plus the field
// the cavity would respond with.  Used to polish the stationary branch well
// past the damped fixed-point tolerance so the trivial-branch defect sits at
// the numerical floor rather than at the iteration tolerance.
Complex stationary_response(const LiouvilleParts& parts, const PhysicalParams& p,
                            Complex alpha, Matrix3c* rho_out) {
  const Matrix9c gen = parts.total(alpha);
  Eigen::JacobiSVD<Matrix9c> svd(gen, Eigen::ComputeFullV);
  Vector9c v = svd.matrixV().col(8);
  const Complex tr = v[0] + v[4] + v[8];
  if (std::abs(tr) < 1e-10) throw SolverError("stationary kernel has vanishing trace");
  v /= tr;
  if (rho_out) *rho_out = devectorize(v);
  const Complex denom(0.5 * p.kappa, p.delta_c_prime());
  return -kImag * p.n_atoms * p.g_c * v[1] / denom;  // v[1] = rho(1, 0)
}

void polish_stationary(const PhysicalParams& p, Complex* alpha, Matrix3c* rho) {
  const LiouvilleParts parts = LiouvilleParts::build(p);
  Complex a = *alpha;
  Matrix3c best_rho = *rho;
  double best = std::numeric_limits<double>::infinity();
  Complex best_a = a;
  for (int iter = 0; iter < 30; ++iter) {
    Matrix3c r0;
    const Complex res = a - stationary_response(parts, p, a, &r0);
    if (std::abs(res) < best) {
      best = std::abs(res);
      best_a = a;
      best_rho = r0;
    }
    if (best < 1e-13 * (1.0 + std::abs(a))) break;

    const double h = 1e-7 * (1.0 + std::abs(a));
    const Complex res_re = (a + h) - stationary_response(parts, p, a + h, nullptr);
    const Complex res_im = (a + h * kImag) - stationary_response(parts, p, a + h * kImag, nullptr);
    Eigen::Matrix2d jac;
    jac << (res_re - res).real() / h, (res_im - res).real() / h,
           (res_re - res).imag() / h, (res_im - res).imag() / h;
    const Eigen::Vector2d rhs(-res.real(), -res.imag());
    const Eigen::Vector2d step = jac.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;

    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 6; ++k, lambda *= 0.5) {
      const Complex cand = a + lambda * Complex(step[0], step[1]);
      const Complex cand_res = cand - stationary_response(parts, p, cand, nullptr);
      if (std::abs(cand_res) < std::abs(res)) {
        a = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  *alpha = best_a;
  *rho = best_rho;
}

// Globalizer: the Newton basin around a lasing solution is narrow, but the
// limit cycle itself is an attractor of the mean-field flow with a large
// basin.  Kick the stationary state, integrate until the flow settles, and
// read the harmonic content straight off the orbit.  Returns nothing when the
// kicked state relaxes back (no cycle reachable from this kick) or when the
// settled motion is not a clean rotation.
std::optional<Vec6> bootstrap_from_flow(const PhysicalParams& p, Complex alpha_stat,
                                        const Matrix3c& rho_stat, bool stationary_unstable) {
  constexpr double kKick = 50.0;
  constexpr double kChunk = 100.0;
  constexpr int kMaxChunks = 8;
  constexpr double kCapture = 2.0;
  constexpr double kMinOmega = 3.2;  // capture window must hold a full period

  try {
    MeanFieldState st;
    st.rho = rho_stat;
    st.alpha = alpha_stat + kKick;
    st.t = 0.0;
    IntegrateOptions copts;
    const double settle_tol = 1e-4 * (1.0 + std::abs(alpha_stat));
    double d_prev = -1.0, d_prev2 = -1.0;
    for (int chunk = 0; chunk < kMaxChunks; ++chunk) {
      st = integrate_steps(p, st, st.t + kChunk, {}, copts, StepCallback{});
      const double d = std::abs(st.alpha - alpha_stat);
      // Early exit once the kick has demonstrably relaxed -- but never when
      // the stationary point is known unstable (a slowly growing mode can
      // pass arbitrarily close to it on the way out).
      if (!stationary_unstable && chunk >= 1 && d < settle_tol)
        return std::nullopt;  // relaxed back to the stationary point
      // Opposite early exit: the orbit radius has been steady for two
      // consecutive chunks, so the flow has already settled onto a cycle.
      if (chunk >= 2 && d > 10.0 * settle_tol &&
          std::abs(d - d_prev) < 0.05 * d && std::abs(d_prev - d_prev2) < 0.05 * d)
        break;
      d_prev2 = d_prev;
      d_prev = d;
    }

    IntegrateOptions fine;
    fine.stride = 0.001;
    st.t = 0.0;
    const Trajectory cyc = integrate(p, st, kCapture, {}, fine);
    const auto& s = cyc.samples;
    if (s.size() < 100) return std::nullopt;

    Complex mean = 0.0;
    for (const auto& x : s) mean += x.alpha;
    mean /= static_cast<double>(s.size());
    double osc = 0.0;
    for (const auto& x : s) osc = std::max(osc, std::abs(x.alpha - mean));
    if (osc < std::max(1e-3, 1e-4 * (1.0 + std::abs(mean)))) return std::nullopt;

    // Signed rotation rate from the accumulated phase of the oscillating part.
    double prev = std::arg(s.front().alpha - mean);
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double ph = std::arg(s[i].alpha - mean);
      double d = ph - prev;
      while (d > M_PI) d -= 2.0 * M_PI;
      while (d < -M_PI) d += 2.0 * M_PI;
      acc += d;
      prev = ph;
    }
    const double omega = acc / (s.back().t - s.front().t);
    if (std::abs(omega) < kMinOmega) return std::nullopt;

    // Project the three harmonics over an integer number of periods; the
    // dominant rotating component lands in the n = +1 bin by construction.
    const double period = 2.0 * M_PI / std::abs(omega);
    const double span = std::floor((s.back().t - s.front().t) / period) * period;
    FloquetField f;
    f.omega = omega;
    Complex* bins[3] = {&f.alpha_m1, &f.alpha_0, &f.alpha_p1};
    for (int n = -1; n <= 1; ++n) {
      Complex sum = 0.0;
      double covered = 0.0;
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].t - s.front().t > span + 1e-9) break;
        const double dt = s[i].t - s[i - 1].t;
        const Complex f0 = s[i - 1].alpha * std::polar(1.0, -n * omega * s[i - 1].t);
        const Complex f1 = s[i].alpha * std::polar(1.0, -n * omega * s[i].t);
        sum += 0.5 * dt * (f0 + f1);
        covered += dt;
      }
      if (covered <= 0.0) return std::nullopt;
      *bins[n + 1] = sum / covered;
    }
    return canonical_seed(f);
  } catch (const Error&) {
    return std::nullopt;  // integration failure: fall back to grid starts
  }
}

FloquetSolution make_lasing(StartResult sr, int index, int total_iters) {
  if (sr.u[4] < 0.0) {
    // Rotate the gauge by pi so the emission amplitude is positive.
    sr.u[0] = -sr.u[0];
    sr.u[1] = -sr.u[1];
    sr.u[4] = -sr.u[4];
    sr.density.rho_m1 = -sr.density.rho_m1;
    sr.density.rho_p1 = -sr.density.rho_p1;
  }
  FloquetSolution s;
  s.field = field_of(sr.u);
  s.density = sr.density;
  s.is_lasing = true;
  s.converged = true;
  s.residual = sr.fvalue;
  s.iterations = total_iters;
  s.start_index = index;
  return s;
}

}  // namespace

Eigen::MatrixXcd block_liouvillian(const FloquetField& f, const PhysicalParams& p) {
  p.validate();
  const LiouvilleParts parts = LiouvilleParts::build(p);
  const Matrix9c l0 =
      parts.atomic + f.alpha_0 * parts.up_unit + std::conj(f.alpha_0) * parts.down_unit;
  const Matrix9c lp =
      f.alpha_p1 * parts.up_unit + std::conj(f.alpha_m1) * parts.down_unit;
  const Matrix9c lm =
      f.alpha_m1 * parts.up_unit + std::conj(f.alpha_p1) * parts.down_unit;

  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(27, 27);
  for (int k = 0; k < 3; ++k) {
    const double n = static_cast<double>(k - 1);
    b.block<9, 9>(9 * k, 9 * k) = kImag * n * f.omega * Matrix9c::Identity() - l0;
    if (k > 0) b.block<9, 9>(9 * k, 9 * (k - 1)) = -lp;
    if (k < 2) b.block<9, 9>(9 * k, 9 * (k + 1)) = -lm;
  }
  return b;
}

FloquetDensity steady_kernel(const Eigen::MatrixXcd& block) {
  if (block.rows() != 27 || block.cols() != 27)
    throw ValidationError("harmonic block generator must be 27x27");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(25) < 1e-8 * sv(0))
    throw SolverError("periodic steady state is not unique (degenerate harmonic kernel)");
  Eigen::VectorXcd v = svd.matrixV().col(26);
  const Complex tr0 = v(9) + v(13) + v(17);
  if (std::abs(tr0) < 1e-10)
    throw SolverError("harmonic kernel has vanishing central-block trace");
  v /= tr0;
  FloquetDensity d;
  d.rho_m1 = devectorize(v.segment<9>(0));
  d.rho_0 = devectorize(v.segment<9>(9));
  d.rho_p1 = devectorize(v.segment<9>(18));
  return d;
}

std::array<Complex, 3> field_update(const FloquetDensity& d, const FloquetField& f,
                                    const PhysicalParams& p) {
  const double dcp = p.delta_c_prime();
  const Complex gain = -kImag * p.n_atoms * p.g_c;
  const auto one = [&](const Matrix3c& rho, double n) {
    const Complex denom(0.5 * p.kappa, dcp + n * f.omega);
    return gain * rho(1, 0) / denom;
  };
  return {one(d.rho_m1, -1.0), one(d.rho_0, 0.0), one(d.rho_p1, 1.0)};
}

double residual_f(const FloquetField& f, const PhysicalParams& p) {
  const FloquetDensity d = steady_kernel(block_liouvillian(f, p));
  const auto tilde = field_update(d, f, p);
  return std::norm(f.alpha_m1 - tilde[0]) + std::norm(f.alpha_0 - tilde[1]) +
         std::norm(f.alpha_p1 - tilde[2]);
}

FloquetSolution solve_selfconsistent(const PhysicalParams& p,
                                     const std::optional<FloquetField>& seed) {
  p.validate();

  // Stationary branch: the fallback answer and the alpha_0 component of every
  // cold start.  Polished past the fixed-point tolerance so the trivial
  // defect sits at the kernel noise floor.
  NonLasingSolution nl = solve_nonlasing(p);
  Complex alpha0 = nl.alpha_ss;
  Matrix3c rho0 = nl.rho_ss;
  if (nl.converged) polish_stationary(p, &alpha0, &rho0);
  if (!nl.converged && !seed)
    throw SolverError(
        "stationary fixed point did not converge and no seed was given");

  int total_iters = 0;
  int start_index = 0;
  std::ostringstream history;
  const auto attempt = [&](const Vec6& u0,
                           const char* label) -> std::optional<FloquetSolution> {
    const StartResult sr = run_start(u0, p);
    total_iters += sr.iterations;
    const int index = start_index++;
    if (sr.usable && std::abs(sr.u[4]) >= kLasingCut)
      return make_lasing(sr, index, total_iters);
    history << " " << label << ": "
            << (sr.collapsed ? "collapsed"
                             : (sr.usable ? "converged non-lasing" : "stalled"))
            << " (best defect " << sr.best_norm << ", " << sr.iterations
            << " iterations);";
    return std::nullopt;
  };

  // 1) Caller seed, typically a neighboring solution during a scan.
  if (seed) {
    if (auto sol = attempt(canonical_seed(*seed), "seed")) return *sol;
  }
  if (!nl.converged)
    throw SolverError("no self-consistent periodic solution found:" + history.str());

  // The leading stability root tells the cold path two things: whether the
  // stationary state can be an attractor at all, and the frequency scale of
  // any cycle that bifurcates from it.
  bool unstable = false;
  std::vector<double> omegas;
  try {
    const StabilityResult st = find_primary_root(nl, p);
    unstable = st.lasing_unstable;
    const double w = std::abs(st.s0.imag());
    if (w > 3.2) omegas = {w, -w};
  } catch (const Error&) {
  }
  if (omegas.empty()) {
    const double dcp = p.delta_c_prime();
    omegas = {-dcp, dcp};
  }

  // 2) Flow bootstrap from the kicked stationary state.
  if (const auto u0 = bootstrap_from_flow(p, alpha0, rho0, unstable)) {
    if (auto sol = attempt(*u0, "flow")) return *sol;
  } else {
    history << " flow: no sustained oscillation;";
  }

  // 3) Newton grid backstop, only for an unstable stationary state whose
  // cycle the flow failed to deliver.  For a stable stationary state cold
  // Newton has nothing to offer: it cannot cross into a basin the kicked
  // flow could not reach, so the stationary answer stands.
  if (unstable) {
    for (const double r0 : {50.0, 10.0, 1.0}) {
      for (const double w0 : omegas) {
        Vec6 u;
        u << 0.0, 0.0, alpha0.real(), alpha0.imag(), r0, w0;
        if (auto sol = attempt(u, "grid")) return *sol;
      }
    }
  }

  // A provably unstable stationary state cannot be the answer; refusing is
  // more honest than returning it.
  if (unstable)
    throw SolverError(
        "stationary state is linearly unstable but no periodic solution was found:" +
        history.str());

  // Every start collapsed onto (or never left) the trivial branch: the
  // stationary solution is the answer.  Its only nonzero defect is the n = 0
  // field mismatch, which the polish above pushed to the numerical floor.
  FloquetSolution s;
  s.field.alpha_m1 = 0.0;
  s.field.alpha_0 = alpha0;
  s.field.alpha_p1 = 0.0;
  s.field.omega = 0.0;
  s.density.rho_0 = rho0;
  s.is_lasing = false;
  s.converged = true;
  const LiouvilleParts parts = LiouvilleParts::build(p);
  const Complex tilde0 = stationary_response(parts, p, alpha0, nullptr);
  s.residual = std::norm(alpha0 - tilde0);
  s.iterations = total_iters;
  s.start_index = -1;
  return s;
}

double avg_intensity(const FloquetSolution& sol) {
  return std::norm(sol.field.alpha_m1) + std::norm(sol.field.alpha_0) +
         std::norm(sol.field.alpha_p1);
}

}  // namespace vlaser
