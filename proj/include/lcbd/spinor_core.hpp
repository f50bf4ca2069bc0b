#pragma once

// Dirac-matrix algebra, Minkowski geometry and the N-particle current tensor.
//
// Conventions used throughout the library:
//   * metric signature (+,-,-,-), components ordered (t, x, y, z);
//   * standard (Dirac) representation,
//       gamma^0 = diag(1, 1, -1, -1),  gamma^k = [[0, sigma_k], [-sigma_k, 0]];
//   * multi-index order (a_1, ..., a_N) with particle 1 the slowest index,
//     flat index = sum_k a_k 4^(N-1-k) (zero-based particle k).

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lcbd {

using Complex = std::complex<double>;

template <typename Scalar>
using FourVectorT = Eigen::Matrix<Scalar, 4, 1>;
using FourVector = FourVectorT<double>;
using Vector3 = Eigen::Vector3d;
using ComplexMatrix4 = Eigen::Matrix4cd;
using DiracSpinor = Eigen::Vector4cd;
using LorentzMatrix = Eigen::Matrix4d;
using GammaTable = std::array<ComplexMatrix4, 4>;

/// Element of (C^4)^{\otimes N}.
struct MultiSpinor {
  int particles = 1;
  Eigen::VectorXcd amplitudes;

  MultiSpinor() : amplitudes(Eigen::VectorXcd::Zero(4)) {}
  MultiSpinor(int n, Eigen::VectorXcd a);

  static MultiSpinor zero(int n);
  static MultiSpinor from(const DiracSpinor& s) { return MultiSpinor(1, s); }

  Eigen::Index size() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
};

/// Real rank-N tensor J^{mu_1 ... mu_N}, same index order as MultiSpinor.
struct CurrentTensor {
  int particles = 1;
  Eigen::VectorXd components;

  double operator()(std::span<const int> mu) const;
};

/// Number of components of a rank-n tensor over a 4-dimensional space.
constexpr Eigen::Index tensor_size(int n) {
  Eigen::Index s = 1;
  for (int k = 0; k < n; ++k) s *= 4;
  return s;
}

template <typename Derived1, typename Derived2>
auto minkowski_dot(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  return a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3);
}

/// eta_{mu nu} v^nu.
template <typename Derived>
FourVectorT<typename Derived::Scalar> lower_index(const Eigen::MatrixBase<Derived>& v) {
  return {v(0), -v(1), -v(2), -v(3)};
}

inline FourVector four_vector(double t, const Vector3& x) { return {t, x.x(), x.y(), x.z()}; }

const GammaTable& standard_gammas();

/// Standard-representation gamma^mu. Throws InvalidArgument for mu outside 0..3.
ComplexMatrix4 gamma(int mu);

/// Apply a single-particle operator to the given slot of a multi-spinor.
MultiSpinor apply_to_slot(const MultiSpinor& psi, int slot, const ComplexMatrix4& op);

/// Apply one operator per slot: (op_1 \otimes ... \otimes op_N) psi.
MultiSpinor apply_product(const MultiSpinor& psi, std::span<const ComplexMatrix4> ops);

MultiSpinor tensor_product(std::span<const DiracSpinor> factors);
MultiSpinor tensor_product(const MultiSpinor& a, const MultiSpinor& b);

/// Components of psi^dagger (gamma^0 \otimes ... \otimes gamma^0), stored as a column.
/// J = dirac_adjoint(psi)^T (Gamma psi), without further conjugation.
MultiSpinor dirac_adjoint(const MultiSpinor& psi, const GammaTable& gammas = standard_gammas());

/// Throws ImaginaryResidue if any component has an imaginary part above
/// 1e-10 |psi|^2.
CurrentTensor current_tensor(const MultiSpinor& psi, const GammaTable& gammas = standard_gammas());

/// max over components of |Im J| / (1 + |Re J|).
double imaginary_residue(const MultiSpinor& psi, const GammaTable& gammas = standard_gammas());

/// Contract every index except particle i's with eta(., u_j).
/// `others` holds the N-1 vectors for j != i in ascending particle order.
FourVector contract_current(const CurrentTensor& J, int i, std::span<const FourVector> others);

/// Spin-1/2 representative S of a boost along `axis` (1..3), satisfying
/// S^{-1} gamma^mu S = Lambda^mu_nu gamma^nu with Lambda = vector_boost(rapidity, axis).
ComplexMatrix4 spinor_boost(double rapidity, int axis);
LorentzMatrix vector_boost(double rapidity, int axis);

/// eta(j, u); positive for currents of nonzero spinors contracted with future timelike vectors.
inline double timelike_certificate(const FourVector& j, const FourVector& u) { return minkowski_dot(j, u); }

}  // namespace lcbd
