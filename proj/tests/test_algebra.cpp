#include <doctest.h>

#include "core/algebra.hpp"
#include "core/errors.hpp"
#include "support.hpp"

using namespace vlaser;
using namespace vlaser::testing;

TEST_CASE("transition operators have a single unit entry") {
  CHECK(sigma(Level::g, Level::e)(0, 1) == Complex(1.0));
  CHECK(sigma(Level::g, Level::e).cwiseAbs().sum() == 1.0);
  CHECK(sigma(Level::e, Level::g)(1, 0) == Complex(1.0));
  CHECK(sigma(Level::a, Level::a)(2, 2) == Complex(1.0));
  // lowering operator is nilpotent
  const Matrix3c s = sigma(Level::g, Level::e);
  CHECK((s * s).norm() == 0.0);
}

TEST_CASE("vectorization round trip and column-stacking order") {
  auto g = rng(101);
  for (int k = 0; k < 20; ++k) {
    const Matrix3c m = random_matrix(g);
    CHECK(matrix_distance(devectorize(vectorize(m)), m) == 0.0);
  }
  // vec(m)[3c + r] == m(r, c)
  Matrix3c m = Matrix3c::Zero();
  m(2, 1) = Complex(3.0, -1.0);
  CHECK(vectorize(m)(3 * 1 + 2) == Complex(3.0, -1.0));
}

TEST_CASE("kron3 reproduces two-sided products on vectorized states") {
  auto g = rng(102);
  for (int k = 0; k < 20; ++k) {
    const Matrix3c a = random_matrix(g), b = random_matrix(g), x = random_matrix(g);
    const Vector9c lhs = kron3(b.transpose(), a) * vectorize(x);
    const Vector9c rhs = vectorize(a * x * b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("commutator superoperator matches -i[h, rho]") {
  auto g = rng(103);
  for (int k = 0; k < 20; ++k) {
    const Matrix3c h = random_hermitian(g), x = random_matrix(g);
    const Matrix3c direct = -kImag * (h * x - x * h);
    CHECK(matrix_distance(commutator_superop(h).apply(x), direct) < 1e-14);
  }
}

TEST_CASE("dissipator action agrees with its superoperator form") {
  auto g = rng(104);
  for (int k = 0; k < 20; ++k) {
    const Matrix3c j = random_matrix(g), x = random_matrix(g);
    CHECK(matrix_distance(dissipator_superop(j).apply(x), dissipator_action(j, x)) < 1e-13);
  }
}

TEST_CASE("decay channel to the ground state has the expected sparse action") {
  // D[|g><e|] rho = rho_ee |g><g| - (sigma_ee rho + rho sigma_ee) / 2
  auto g = rng(105);
  const Matrix3c see = sigma(Level::e, Level::e);
  const Matrix3c sgg = sigma(Level::g, Level::g);
  for (int k = 0; k < 20; ++k) {
    const Matrix3c x = random_matrix(g);
    const Matrix3c expect = x(1, 1) * sgg - 0.5 * (see * x + x * see);
    CHECK(matrix_distance(dissipator_action(sigma(Level::g, Level::e), x), expect) < 1e-14);
  }
}

TEST_CASE("atomic hamiltonian layout") {
  PhysicalParams p;
  p.delta_p = 0.7;
  p.delta_m = -3.0;
  p.omega_p = 2.0;
  p.omega_m = 5.0;
  const Matrix3c h = atomic_hamiltonian(p);
  CHECK(h(0, 0) == Complex(0.0));
  CHECK(h(1, 1) == Complex(-0.7));
  CHECK(h(2, 2) == Complex(3.0));
  CHECK(h(0, 1) == Complex(1.0));
  CHECK(h(0, 2) == Complex(2.5));
  CHECK(matrix_distance(h, h.adjoint()) == 0.0);
}

TEST_CASE("atomic liouvillian preserves trace and hermiticity") {
  auto g = rng(106);
  const Superoperator l = atomic_liouvillian(default_params());
  for (int k = 0; k < 20; ++k) {
    const Matrix3c x = random_hermitian(g);
    const Matrix3c lx = l.apply(x);
    CHECK(std::abs(lx.trace()) < 1e-12);
    CHECK(matrix_distance(lx, lx.adjoint()) < 1e-12);
  }
}

TEST_CASE("undriven atom is stationary in the ground state") {
  PhysicalParams p;
  p.omega_p = 0.0;
  p.omega_m = 0.0;
  const Matrix3c rho = sigma(Level::g, Level::g);
  CHECK(atomic_liouvillian(p).apply(rho).norm() < 1e-15);
}

TEST_CASE("undriven atom: |e><g| coherence is an eigenoperator") {
  // With both drives off, the generator acts diagonally on the g-e coherence:
  // L |e><g| = (i delta_p - gamma_e / 2) |e><g|.  This anchors the closed
  // form used by the stability tests.
  PhysicalParams p;
  p.omega_p = 0.0;
  p.omega_m = 0.0;
  p.delta_p = 0.7;
  const Matrix3c seg = sigma(Level::e, Level::g);
  const Matrix3c got = atomic_liouvillian(p).apply(seg);
  const Matrix3c expect = (kImag * p.delta_p - 0.5 * p.gamma_e) * seg;
  CHECK(matrix_distance(got, expect) < 1e-14);
}

TEST_CASE("field generator equals the cavity hamiltonian commutator") {
  // For any alpha, raising(alpha) + lowering(conj(alpha)) must equal
  // -i [g_c (alpha* |g><e| + alpha |e><g|), .].
  auto g = rng(107);
  const PhysicalParams p = default_params();
  for (int k = 0; k < 10; ++k) {
    const Complex alpha = random_complex(g, 5.0);
    const Matrix3c hf = p.g_c * (std::conj(alpha) * sigma(Level::g, Level::e) +
                                 alpha * sigma(Level::e, Level::g));
    const Superoperator via_h = commutator_superop(hf);
    const Superoperator split = field_liouvillian(alpha, p);
    CHECK(matrix_distance(via_h.m, split.m) < 1e-14);
  }
}

TEST_CASE("field generator is linear in its scalar arguments") {
  const PhysicalParams p = default_params();
  const LiouvilleParts parts = LiouvilleParts::build(p);
  auto g = rng(108);
  for (int k = 0; k < 10; ++k) {
    const Complex a = random_complex(g, 3.0);
    CHECK(matrix_distance(Matrix9c(a * parts.up_unit), field_raising(a, p).m) < 1e-14);
    CHECK(matrix_distance(Matrix9c(a * parts.down_unit), field_lowering(a, p).m) < 1e-14);
    CHECK(matrix_distance(parts.field(a), field_liouvillian(a, p).m) < 1e-14);
    CHECK(matrix_distance(parts.total(a),
                          Matrix9c(parts.atomic + field_liouvillian(a, p).m)) < 1e-14);
  }
}

TEST_CASE("parameter validation flags bad fields by name") {
  PhysicalParams p;
  p.n_atoms = -5.0;
  CHECK_THROWS_WITH_AS(p.validate(), "n_atoms must be non-negative", ValidationError);
  p = PhysicalParams{};
  p.kappa = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = PhysicalParams{};
  p.validate();  // defaults are valid
}

TEST_CASE("parameter fields are addressable by name") {
  PhysicalParams p;
  p.*param_field("omega_p") = 15.0;
  CHECK(p.omega_p == 15.0);
  CHECK(p.*param_field("n_atoms") == 20000.0);
  CHECK_THROWS_AS(param_field("omega_q"), ValidationError);
  CHECK(param_names().size() == 10);
}
