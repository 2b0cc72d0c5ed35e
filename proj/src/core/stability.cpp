#include "core/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"

namespace vlaser {

namespace {

// Relative distance below which s counts as sitting on a resolvent pole.
constexpr double kPoleTol = 1e-8;
// Roots closer than this to the pole set are spurious (the determinant has a
// pole, not a zero).
constexpr double kRootPoleExclusion = 1e-6;
// Two roots closer than this are the same root reached from different seeds.
constexpr double kRootDedupe = 1e-6;

Complex field_consistency(const Matrix3c& rho, const PhysicalParams& p) {
  const Complex denom(0.5 * p.kappa, p.delta_c_prime());
  return -kImag * p.n_atoms * p.g_c * rho(1, 0) / denom;
}

// Trace-normalized, hermitized kernel vector of a 9x9 generator.
Matrix3c kernel_state(const Matrix9c& l) {
  Eigen::JacobiSVD<Matrix9c> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(7) < 1e-8 * sv(0))
    throw SolverError("stationary state is degenerate: generator kernel is not one-dimensional");
  Matrix3c rho = devectorize(svd.matrixV().col(8));
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw SolverError("stationary kernel vector has (near-)zero trace, cannot normalize");
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

struct Ctx {
  PhysicalParams p;
  double ng2;                             // N g_c^2
  Matrix9c l;                             // full generator at alpha_ss
  Eigen::Matrix<Complex, 9, 1> evals;     // resolvent poles
  Vector9c rhs_u, rhs_v;                  // vec([sge, rho]), vec([seg, rho])

  Ctx(const NonLasingSolution& sol, const PhysicalParams& params) : p(params) {
    if (!sol.converged)
      throw ValidationError("stability analysis requires a converged stationary solution");
    ng2 = p.n_atoms * p.g_c * p.g_c;
    l = LiouvilleParts::build(p).total(sol.alpha_ss);
    Eigen::ComplexEigenSolver<Matrix9c> es(l, false);
    if (es.info() != Eigen::Success)
      throw SolverError("eigendecomposition of the stationary generator failed");
    evals = es.eigenvalues();
    const Matrix3c sge = sigma(Level::g, Level::e);
    const Matrix3c seg = sigma(Level::e, Level::g);
    rhs_u = vectorize(sge * sol.rho_ss - sol.rho_ss * sge);
    rhs_v = vectorize(seg * sol.rho_ss - sol.rho_ss * seg);
  }

  double pole_distance(Complex s) const {
    return (evals.array() - s).abs().minCoeff();
  }

  void check_pole(Complex s) const {
    if (pole_distance(s) < kPoleTol * (1.0 + std::abs(s))) {
      std::ostringstream os;
      os << "s = (" << s.real() << ", " << s.imag()
         << ") lies on the resolvent pole set of the stationary generator";
      throw SolverError(os.str());
    }
  }

  Eigen::PartialPivLU<Matrix9c> resolvent_lu(Complex s) const {
    check_pole(s);
    Matrix9c w = -l;
    w.diagonal().array() += s;
    return Eigen::PartialPivLU<Matrix9c>(w);
  }

  Eigen::Matrix2cd c_matrix(Complex s) const {
    const auto lu = resolvent_lu(s);
    const Matrix3c u = devectorize(lu.solve(rhs_u));
    const Matrix3c v = devectorize(lu.solve(rhs_v));
    // tr(|g><e| m) = m(1,0), tr(|e><g| m) = m(0,1)
    const Complex x = u(1, 0), y = v(1, 0);
    const Complex ybar = u(0, 1), xbar = v(0, 1);
    const Complex diag(0.5 * p.kappa, p.delta_c_prime());
    Eigen::Matrix2cd c;
    c(0, 0) = s + diag + ng2 * y;
    c(0, 1) = ng2 * x;
    c(1, 0) = -ng2 * xbar;
    c(1, 1) = s + std::conj(diag) - ng2 * ybar;
    return c;
  }

  Complex det(Complex s) const {
    const Eigen::Matrix2cd c = c_matrix(s);
    return c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
  }
};

// Reference magnitude for the residual-ratio acceptance of a root.
double det_reference(const Ctx& ctx, Complex root) {
  for (const Complex offset : {Complex(1.0, 0.0), Complex(1.0, 0.7), Complex(0.0, 1.3)}) {
    const Complex probe = root + offset;
    if (ctx.pole_distance(probe) > kPoleTol * (1.0 + std::abs(probe)))
      return std::abs(ctx.det(probe));
  }
  return 0.0;  // pathological; caller will reject the root
}

}  // namespace

NonLasingSolution solve_nonlasing(const PhysicalParams& p, int max_iter, double tol,
                                  double mix) {
  p.validate();
  if (max_iter < 1 || tol <= 0 || mix <= 0 || mix > 1)
    throw ValidationError("solve_nonlasing: bad iteration controls");
  const LiouvilleParts parts = LiouvilleParts::build(p);
  NonLasingSolution sol;
  Complex alpha = 0.0;
  Matrix3c rho = Matrix3c::Zero();
  for (int it = 1; it <= max_iter; ++it) {
    rho = kernel_state(parts.total(alpha));
    const Complex alpha_new = field_consistency(rho, p);
    const double resid = std::abs(alpha_new - alpha);
    sol.iterations = it;
    sol.residual = resid;
    if (resid <= tol) {
      sol.rho_ss = rho;
      sol.alpha_ss = alpha;
      sol.converged = true;
      return sol;
    }
    alpha = (1.0 - mix) * alpha + mix * alpha_new;
  }
  sol.rho_ss = rho;
  sol.alpha_ss = alpha;
  sol.converged = false;
  return sol;
}

Matrix3c resolvent_solve(Complex s, const NonLasingSolution& sol, const Matrix3c& rhs,
                         const PhysicalParams& p) {
  const Ctx ctx(sol, p);
  return devectorize(ctx.resolvent_lu(s).solve(vectorize(rhs)));
}

std::pair<Complex, Complex> eval_xy(Complex s, const NonLasingSolution& sol,
                                    const PhysicalParams& p) {
  const Ctx ctx(sol, p);
  const auto lu = ctx.resolvent_lu(s);
  const Complex x = devectorize(lu.solve(ctx.rhs_u))(1, 0);
  const Complex y = devectorize(lu.solve(ctx.rhs_v))(1, 0);
  return {x, y};
}

Eigen::Matrix2cd eval_c(Complex s, const NonLasingSolution& sol, const PhysicalParams& p) {
  return Ctx(sol, p).c_matrix(s);
}

Complex dispersion(Complex s, const NonLasingSolution& sol, const PhysicalParams& p) {
  return Ctx(sol, p).det(s);
}

namespace {

struct RootCandidate {
  Complex s;
  double abs_det;
};

// Damped Newton iteration on det C(s) with a central-difference derivative.
// Returns true when the final update satisfied |ds| <= step_tol.
bool newton_root(const Ctx& ctx, Complex seed, Complex& out) {
  constexpr double kFdStep = 1e-6;
  constexpr double kStepTol = 1e-10;
  constexpr int kMaxIter = 200;

  Complex s = seed;
  // Seeds may land on the pole set (s = 0 always does: the trace zero mode);
  // push them off before iterating.
  if (ctx.pole_distance(s) < 1e-3)
    s += 0.618 * std::max(1e-3, ctx.p.kappa);

  try {
    for (int it = 0; it < kMaxIter; ++it) {
      const Complex d0 = ctx.det(s);
      const Complex dp = ctx.det(s + kFdStep) - ctx.det(s - kFdStep);
      const Complex dprime = dp / (2.0 * kFdStep);
      if (!std::isfinite(std::abs(dprime)) || std::abs(dprime) == 0.0) return false;
      const Complex full_step = -d0 / dprime;
      double lambda = 1.0;
      Complex s_next = s + full_step;
      while (lambda > 1.0 / 256.0 && std::abs(ctx.det(s_next)) >= std::abs(d0)) {
        lambda *= 0.5;
        s_next = s + lambda * full_step;
      }
      const double moved = std::abs(s_next - s);
      s = s_next;
      if (moved <= kStepTol) {
        out = s;
        return true;
      }
    }
  } catch (const SolverError&) {
    return false;  // wandered onto the pole set
  }
  return false;
}

}  // namespace

StabilityResult find_primary_root(const NonLasingSolution& sol, const PhysicalParams& p,
                                  const std::vector<Complex>& extra_seeds) {
  const Ctx ctx(sol, p);
  const double dcp = p.delta_c_prime();

  std::vector<Complex> seeds;
  for (const double re : {-p.kappa, 0.0, p.kappa})
    for (const double im : {0.0, dcp, -dcp, dcp + 0.5 * p.omega_m, -(dcp + 0.5 * p.omega_m),
                            dcp - 0.5 * p.omega_m, -(dcp - 0.5 * p.omega_m)})
      seeds.emplace_back(re, im);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

  std::vector<RootCandidate> accepted;
  for (const Complex seed : seeds) {
    Complex root;
    if (!newton_root(ctx, seed, root)) continue;
    // A zero of det C must not coincide with a resolvent pole (where the
    // determinant blows up and Newton can stall on noise).
    if (ctx.pole_distance(root) < kRootPoleExclusion) continue;
    const double abs_det = std::abs(ctx.det(root));
    const double ref = det_reference(ctx, root);
    if (!(ref > 0.0) || abs_det > 1e-8 * ref) continue;
    bool duplicate = false;
    for (auto& cand : accepted) {
      if (std::abs(cand.s - root) < kRootDedupe) {
        duplicate = true;
        if (abs_det < cand.abs_det) cand = {root, abs_det};
        break;
      }
    }
    if (!duplicate) accepted.push_back({root, abs_det});
  }

  if (accepted.empty())
    throw SolverError("no dispersion root converged from any seed");

  std::sort(accepted.begin(), accepted.end(), [](const RootCandidate& a, const RootCandidate& b) {
    if (a.s.real() != b.s.real()) return a.s.real() > b.s.real();
    return a.s.imag() > b.s.imag();
  });

  StabilityResult result;
  for (const auto& cand : accepted) result.roots.push_back(cand.s);
  result.s0 = result.roots.front();
  result.lasing_unstable = result.s0.real() > 0.0;
  return result;
}

double threshold_bisect(const PhysicalParams& p, const std::string& axis, double lo,
                        double hi, double tol) {
  p.validate();
  if (!(lo < hi)) throw ValidationError("threshold_bisect: require lo < hi");
  if (tol <= 0) throw ValidationError("threshold_bisect: tol must be positive");
  auto field = param_field(axis);

  auto growth_rate = [&](double x) {
    PhysicalParams q = p;
    q.*field = x;
    const NonLasingSolution sol = solve_nonlasing(q);
    if (!sol.converged) {
      std::ostringstream os;
      os << "stationary solve did not converge during threshold scan at " << axis << " = "
         << x << " (residual " << sol.residual << ")";
      throw SolverError(os.str());
    }
    return find_primary_root(sol, q).s0.real();
  };

  double f_lo = growth_rate(lo);
  double f_hi = growth_rate(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) {
    std::ostringstream os;
    os << "no stability change along " << axis << " in [" << lo << ", " << hi
       << "]: Re s0 = " << f_lo << " and " << f_hi;
    throw ValidationError(os.str());
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = growth_rate(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigen::Matrix<Complex, 9, 1> liouvillian_spectrum(const NonLasingSolution& sol,
                                                  const PhysicalParams& p) {
  Ctx ctx(sol, p);
  Eigen::Matrix<Complex, 9, 1> ev = ctx.evals;
  std::sort(ev.data(), ev.data() + 9, [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return ev;
}

}  // namespace vlaser
