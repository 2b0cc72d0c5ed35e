#include "core/algebra.hpp"

namespace vlaser {

Matrix3c sigma(Level k, Level l) {
  Matrix3c m = Matrix3c::Zero();
  m(static_cast<int>(k), static_cast<int>(l)) = 1.0;
  return m;
}

Vector9c vectorize(const Matrix3c& m) {
  Vector9c v;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) v(3 * c + r) = m(r, c);
  return v;
}

Matrix3c devectorize(const Vector9c& v) {
  Matrix3c m;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) m(r, c) = v(3 * c + r);
  return m;
}

Matrix9c kron3(const Matrix3c& a, const Matrix3c& b) {
  Matrix9c k;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      k.block<3, 3>(3 * p, 3 * q) = a(p, q) * b;
  return k;
}

namespace {

const Matrix3c kId3 = Matrix3c::Identity();

// rho -> [m, rho] as a 9x9 matrix (no -i factor).
Matrix9c commutator_matrix(const Matrix3c& m) {
  return kron3(kId3, m) - kron3(m.transpose(), kId3);
}

}  // namespace

Superoperator commutator_superop(const Matrix3c& h) {
  return {-kImag * commutator_matrix(h)};
}

Matrix3c dissipator_action(const Matrix3c& jump, const Matrix3c& rho) {
  const Matrix3c jdj = jump.adjoint() * jump;
  return jump * rho * jump.adjoint() - 0.5 * (jdj * rho + rho * jdj);
}

Superoperator dissipator_superop(const Matrix3c& jump) {
  const Matrix3c jdj = jump.adjoint() * jump;
  Matrix9c m = kron3(jump.conjugate(), jump) -
               0.5 * (kron3(kId3, jdj) + kron3(jdj.transpose(), kId3));
  return {m};
}

Matrix3c atomic_hamiltonian(const PhysicalParams& p) {
  Matrix3c h = Matrix3c::Zero();
  h(1, 1) = -p.delta_p;
  h(2, 2) = -p.delta_m;
  h(0, 1) = h(1, 0) = 0.5 * p.omega_p;
  h(0, 2) = h(2, 0) = 0.5 * p.omega_m;
  return h;
}

Superoperator atomic_liouvillian(const PhysicalParams& p) {
  Superoperator l = commutator_superop(atomic_hamiltonian(p));
  l.m += p.gamma_e * dissipator_superop(sigma(Level::g, Level::e)).m;
  l.m += p.gamma_a * dissipator_superop(sigma(Level::g, Level::a)).m;
  return l;
}

Superoperator field_raising(Complex a, const PhysicalParams& p) {
  return {(-kImag * p.g_c * a) * commutator_matrix(sigma(Level::e, Level::g))};
}

Superoperator field_lowering(Complex b, const PhysicalParams& p) {
  return {(-kImag * p.g_c * b) * commutator_matrix(sigma(Level::g, Level::e))};
}

Superoperator field_liouvillian(Complex alpha, const PhysicalParams& p) {
  return field_raising(alpha, p) + field_lowering(std::conj(alpha), p);
}

LiouvilleParts LiouvilleParts::build(const PhysicalParams& p) {
  LiouvilleParts parts;
  parts.atomic = atomic_liouvillian(p).m;
  parts.up_unit = field_raising(1.0, p).m;
  parts.down_unit = field_lowering(1.0, p).m;
  return parts;
}

}  // namespace vlaser
