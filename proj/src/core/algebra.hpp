#pragma once

#include <Eigen/Dense>
#include <complex>

#include "core/params.hpp"

namespace vlaser {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;
using Matrix9c = Eigen::Matrix<Complex, 9, 9>;

inline constexpr Complex kImag{0.0, 1.0};

// Basis labels for the V system.
enum class Level : int { g = 0, e = 1, a = 2 };

// Transition operator |k><l|.
Matrix3c sigma(Level k, Level l);

// Column-stacking vectorization: vec(m)[3*c + r] = m(r, c), so that
// vec(A rho B) = kron(B^T, A) vec(rho).
Vector9c vectorize(const Matrix3c& m);
Matrix3c devectorize(const Vector9c& v);

// Kronecker product of two 3x3 matrices in the block convention matching
// vectorize() above.
Matrix9c kron3(const Matrix3c& a, const Matrix3c& b);

// A linear map on density matrices, stored as its 9x9 matrix in the
// vectorized basis.
struct Superoperator {
  Matrix9c m = Matrix9c::Zero();

  Matrix3c apply(const Matrix3c& rho) const { return devectorize(m * vectorize(rho)); }

  Superoperator& operator+=(const Superoperator& o) { m += o.m; return *this; }
  friend Superoperator operator+(Superoperator a, const Superoperator& b) { a += b; return a; }
  friend Superoperator operator*(Complex c, Superoperator s) { s.m *= c; return s; }
};

// rho -> -i [h, rho]
Superoperator commutator_superop(const Matrix3c& h);

// rho -> J rho J^dag - (J^dag J rho + rho J^dag J) / 2
Matrix3c dissipator_action(const Matrix3c& jump, const Matrix3c& rho);
Superoperator dissipator_superop(const Matrix3c& jump);

// Bare atomic Hamiltonian in the rotating frame of the two drives:
//   H = -delta_p |e><e| - delta_m |a><a|
//       + omega_p/2 (|g><e| + |e><g|) + omega_m/2 (|g><a| + |a><g|)
Matrix3c atomic_hamiltonian(const PhysicalParams& p);

// Drive + decay part of the generator: -i[H, .] + gamma_e D[|g><e|] + gamma_a D[|g><a|].
Superoperator atomic_liouvillian(const PhysicalParams& p);

// Cavity-coupling parts.  The generator produced by the field amplitude alpha
// splits into two maps that are each linear in their scalar argument:
//   raising:  rho -> -i g_c a [|e><g|, rho]         (a = alpha)
//   lowering: rho -> -i g_c b [|g><e|, rho]         (b = conj(alpha))
Superoperator field_raising(Complex a, const PhysicalParams& p);
Superoperator field_lowering(Complex b, const PhysicalParams& p);

// Full field generator for amplitude alpha: raising(alpha) + lowering(conj(alpha)).
Superoperator field_liouvillian(Complex alpha, const PhysicalParams& p);

// Unit generators cached once per parameter set.  Everything downstream
// (time stepping, stability, Floquet blocks) assembles its 9x9 operators from
// these instead of rebuilding Kronecker products.
struct LiouvilleParts {
  Matrix9c atomic;     // atomic_liouvillian
  Matrix9c up_unit;    // field_raising(1)
  Matrix9c down_unit;  // field_lowering(1)

  static LiouvilleParts build(const PhysicalParams& p);

  Matrix9c field(Complex alpha) const {
    return alpha * up_unit + std::conj(alpha) * down_unit;
  }
  Matrix9c total(Complex alpha) const { return atomic + field(alpha); }
};

}  // namespace vlaser
