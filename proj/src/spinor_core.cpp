#include "lcbd/spinor_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcbd/error.hpp"

namespace lcbd {

namespace {

GammaTable make_standard_gammas() {
  const Complex one(1.0, 0.0);
  const Complex I(0.0, 1.0);
  GammaTable g;
  for (auto& m : g) m.setZero();

  g[0].diagonal() << one, one, -one, -one;

  // gamma^k = [[0, sigma_k], [-sigma_k, 0]]
  Eigen::Matrix2cd sigma[3];
  sigma[0] << 0, one, one, 0;
  sigma[1] << 0, -I, I, 0;
  sigma[2] << one, 0, 0, -one;
  for (int k = 0; k < 3; ++k) {
    g[k + 1].topRightCorner<2, 2>() = sigma[k];
    g[k + 1].bottomLeftCorner<2, 2>() = -sigma[k];
  }
  return g;
}

void check_particles(int n) {
  if (n < 1 || n > 8) throw Error(ErrorKind::InvalidArgument, "particle count must be in 1..8, got " + std::to_string(n));
}

}  // namespace

MultiSpinor::MultiSpinor(int n, Eigen::VectorXcd a) : particles(n), amplitudes(std::move(a)) {
  check_particles(n);
  if (amplitudes.size() != tensor_size(n))
    throw Error(ErrorKind::InvalidArgument, "multi-spinor of " + std::to_string(n) + " particles needs " +
                                                std::to_string(tensor_size(n)) + " amplitudes");
}

MultiSpinor MultiSpinor::zero(int n) {
  check_particles(n);
  return MultiSpinor(n, Eigen::VectorXcd::Zero(tensor_size(n)));
}

double CurrentTensor::operator()(std::span<const int> mu) const {
  if (static_cast<int>(mu.size()) != particles)
    throw Error(ErrorKind::InvalidArgument, "current tensor index has wrong rank");
  Eigen::Index flat = 0;
  for (int m : mu) {
    if (m < 0 || m > 3) throw Error(ErrorKind::InvalidArgument, "tensor index out of range");
    flat = flat * 4 + m;
  }
  return components(flat);
}

const GammaTable& standard_gammas() {
  static const GammaTable table = make_standard_gammas();
  return table;
}

ComplexMatrix4 gamma(int mu) {
  if (mu < 0 || mu > 3) throw Error(ErrorKind::InvalidArgument, "gamma index must be 0..3, got " + std::to_string(mu));
  return standard_gammas()[mu];
}

MultiSpinor apply_to_slot(const MultiSpinor& psi, int slot, const ComplexMatrix4& op) {
  if (slot < 0 || slot >= psi.particles) throw Error(ErrorKind::InvalidArgument, "slot out of range");
  const Eigen::Index stride = tensor_size(psi.particles - 1 - slot);
  const Eigen::Index block = 4 * stride;
  MultiSpinor out = MultiSpinor::zero(psi.particles);
  for (Eigen::Index outer = 0; outer < psi.size(); outer += block) {
    for (Eigen::Index inner = 0; inner < stride; ++inner) {
      const Eigen::Index base = outer + inner;
      for (int a = 0; a < 4; ++a) {
        Complex acc = 0.0;
        for (int b = 0; b < 4; ++b) acc += op(a, b) * psi.amplitudes(base + b * stride);
        out.amplitudes(base + a * stride) = acc;
      }
    }
  }
  return out;
}

MultiSpinor apply_product(const MultiSpinor& psi, std::span<const ComplexMatrix4> ops) {
  if (static_cast<int>(ops.size()) != psi.particles)
    throw Error(ErrorKind::InvalidArgument, "need one operator per particle");
  MultiSpinor out = psi;
  for (int k = 0; k < psi.particles; ++k) out = apply_to_slot(out, k, ops[k]);
  return out;
}

MultiSpinor tensor_product(const MultiSpinor& a, const MultiSpinor& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a.amplitudes(i) * b.amplitudes;
  return MultiSpinor(a.particles + b.particles, std::move(out));
}

MultiSpinor tensor_product(std::span<const DiracSpinor> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "tensor product of no factors");
  MultiSpinor out = MultiSpinor::from(factors[0]);
  for (std::size_t k = 1; k < factors.size(); ++k) out = tensor_product(out, MultiSpinor::from(factors[k]));
  return out;
}

MultiSpinor dirac_adjoint(const MultiSpinor& psi, const GammaTable& gammas) {
  // (psi^dagger G)^T = G^T conj(psi) with G = gamma^0 on every slot.
  const ComplexMatrix4 g0t = gammas[0].transpose();
  MultiSpinor out(psi.particles, psi.amplitudes.conjugate());
  for (int k = 0; k < psi.particles; ++k) out = apply_to_slot(out, k, g0t);
  return out;
}

namespace {

// psi-bar (gamma^{mu_1} x ... x gamma^{mu_N}) psi before discarding imaginary parts.
Eigen::VectorXcd bilinear_components(const MultiSpinor& psi, const GammaTable& gammas) {
  const int n = psi.particles;
  const MultiSpinor bar = dirac_adjoint(psi, gammas);

  // Breadth-first application of gamma^{mu_k} slot by slot; level k holds
  // 4^k partially transformed spinors indexed by (mu_1 ... mu_k).
  std::vector<MultiSpinor> level{psi};
  for (int k = 0; k < n; ++k) {
    std::vector<MultiSpinor> next;
    next.reserve(level.size() * 4);
    for (const auto& partial : level)
      for (int mu = 0; mu < 4; ++mu) next.push_back(apply_to_slot(partial, k, gammas[mu]));
    level = std::move(next);
  }

  Eigen::VectorXcd out(tensor_size(n));
  for (Eigen::Index flat = 0; flat < out.size(); ++flat) out(flat) = bar.amplitudes.transpose() * level[flat].amplitudes;
  return out;
}

}  // namespace

CurrentTensor current_tensor(const MultiSpinor& psi, const GammaTable& gammas) {
  const Eigen::VectorXcd values = bilinear_components(psi, gammas);
  const double scale = psi.amplitudes.squaredNorm();
  for (Eigen::Index flat = 0; flat < values.size(); ++flat) {
    if (std::abs(values(flat).imag()) > 1e-10 * scale)
      throw Error(ErrorKind::ImaginaryResidue, "component " + std::to_string(flat) + " has imaginary part " +
                                                   std::to_string(values(flat).imag()));
  }
  return CurrentTensor{psi.particles, values.real()};
}

double imaginary_residue(const MultiSpinor& psi, const GammaTable& gammas) {
  const Eigen::VectorXcd values = bilinear_components(psi, gammas);
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, std::abs(v.imag()) / (1.0 + std::abs(v.real())));
  return worst;
}

FourVector contract_current(const CurrentTensor& J, int i, std::span<const FourVector> others) {
  const int n = J.particles;
  if (i < 0 || i >= n) throw Error(ErrorKind::InvalidArgument, "particle index out of range");
  if (static_cast<int>(others.size()) != n - 1)
    throw Error(ErrorKind::InvalidArgument, "contraction needs N-1 four-vectors");

  // lowered[k] = eta u_k for each slot k != i, aligned with slot numbering
  std::vector<FourVector> lowered(n, FourVector::Zero());
  for (int k = 0, o = 0; k < n; ++k)
    if (k != i) lowered[k] = lower_index(others[o++]);

  FourVector j = FourVector::Zero();
  for (Eigen::Index flat = 0; flat < J.components.size(); ++flat) {
    double weight = J.components(flat);
    int free_index = 0;
    Eigen::Index rest = flat;
    for (int k = n - 1; k >= 0; --k) {
      const int mu = static_cast<int>(rest % 4);
      rest /= 4;
      if (k == i)
        free_index = mu;
      else
        weight *= lowered[k](mu);
    }
    j(free_index) += weight;
  }
  return j;
}

ComplexMatrix4 spinor_boost(double rapidity, int axis) {
  if (axis < 1 || axis > 3) throw Error(ErrorKind::InvalidArgument, "boost axis must be 1..3");
  const auto& g = standard_gammas();
  // (gamma^0 gamma^k)^2 = 1, so the exponential closes in cosh/sinh.
  return std::cosh(0.5 * rapidity) * ComplexMatrix4::Identity() + std::sinh(0.5 * rapidity) * (g[0] * g[axis]);
}

LorentzMatrix vector_boost(double rapidity, int axis) {
  if (axis < 1 || axis > 3) throw Error(ErrorKind::InvalidArgument, "boost axis must be 1..3");
  LorentzMatrix L = LorentzMatrix::Identity();
  L(0, 0) = L(axis, axis) = std::cosh(rapidity);
  L(0, axis) = L(axis, 0) = std::sinh(rapidity);
  return L;
}

}  // namespace lcbd
