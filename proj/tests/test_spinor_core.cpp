#include <doctest.h>

#include "lcbd/error.hpp"
#include "lcbd/random.hpp"
#include "lcbd/spinor_core.hpp"
#include "oracles.hpp"

using namespace lcbd;

TEST_CASE("gamma matrices match the standard representation") {
  for (int mu = 0; mu < 4; ++mu) CHECK((gamma(mu) - oracle::gamma(mu)).norm() == 0.0);
  CHECK_THROWS_AS(gamma(4), Error);
  CHECK_THROWS_AS(gamma(-1), Error);
}

TEST_CASE("Clifford relations hold exactly") {
  const double eta[4] = {1, -1, -1, -1};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const ComplexMatrix4 anti = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
      CHECK(anti == ((mu == nu ? 2.0 * eta[mu] : 0.0) * ComplexMatrix4::Identity()).eval());
    }
  // gamma^0 gamma^mu is hermitian, so psi-bar gamma psi is real
  for (int mu = 0; mu < 4; ++mu) CHECK(((gamma(0) * gamma(mu)).adjoint() - gamma(0) * gamma(mu)).norm() == 0.0);
}

TEST_CASE("multi-spinor sizes are validated") {
  CHECK_THROWS_AS(MultiSpinor(2, Eigen::VectorXcd::Zero(4)), Error);
  CHECK_THROWS_AS(MultiSpinor::zero(0), Error);
  CHECK_THROWS_AS(MultiSpinor::zero(9), Error);
  CHECK(MultiSpinor::zero(3).size() == 64);
}

TEST_CASE("slot operators agree with explicit Kronecker products") {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    const MultiSpinor psi = random_multispinor(rng, n);
    std::vector<ComplexMatrix4> ops;
    Eigen::MatrixXcd full;
    for (int k = 0; k < n; ++k) {
      ComplexMatrix4 op = ComplexMatrix4::Random();
      ops.push_back(op);
      full = k == 0 ? Eigen::MatrixXcd(op) : oracle::kron(full, op);
    }
    const MultiSpinor out = apply_product(psi, ops);
    CHECK((out.amplitudes - full * psi.amplitudes).norm() < 1e-12 * full.norm() * psi.norm());
  }
}

TEST_CASE("tensor product orders particle 1 slowest") {
  DiracSpinor a, b;
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  const std::array<DiracSpinor, 2> factors{a, b};
  const MultiSpinor ab = tensor_product(std::span<const DiracSpinor>(factors));
  CHECK(ab.amplitudes(0) == Complex(5));
  CHECK(ab.amplitudes(1) == Complex(6));
  CHECK(ab.amplitudes(4) == Complex(10));
  CHECK(ab.amplitudes(15) == Complex(32));
}

TEST_CASE("current tensor matches the dense bilinear") {
  Rng rng(5);
  for (int n = 1; n <= 3; ++n) {
    const MultiSpinor psi = random_multispinor(rng, n);
    const CurrentTensor J = current_tensor(psi);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> mu(n);
      for (auto& m : mu) m = static_cast<int>(rng() % 4);
      const Complex expected = oracle::bilinear(psi.amplitudes, mu);
      CHECK(std::abs(expected.imag()) < 1e-10 * psi.amplitudes.squaredNorm());
      CHECK(J(mu) == doctest::Approx(expected.real()).epsilon(1e-12));
    }
    std::vector<int> zeros(n, 0);
    CHECK(J(zeros) == doctest::Approx(psi.amplitudes.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("current tensor rejects bad index tuples") {
  const CurrentTensor J = current_tensor(MultiSpinor::zero(2));
  const std::vector<int> short_index{0};
  const std::vector<int> bad{0, 4};
  CHECK_THROWS_AS(J(short_index), Error);
  CHECK_THROWS_AS(J(bad), Error);
}

TEST_CASE("contraction of a product state factorizes") {
  Rng rng(7);
  const MultiSpinor a = random_multispinor(rng, 1), b = random_multispinor(rng, 1);
  const FourVector u = random_future_timelike(rng);
  const CurrentTensor Ja = current_tensor(a), Jb = current_tensor(b);
  const FourVector ja = Ja.components, jb = Jb.components;
  const std::array<FourVector, 1> others{u};
  const FourVector j1 = contract_current(current_tensor(tensor_product(a, b)), 0, others);
  const FourVector j2 = contract_current(current_tensor(tensor_product(a, b)), 1, others);
  CHECK((j1 - ja * minkowski_dot(jb, u)).norm() < 1e-12 * j1.norm());
  CHECK((j2 - jb * minkowski_dot(ja, u)).norm() < 1e-12 * j2.norm());
  CHECK_THROWS_AS(contract_current(Ja, 1, {}), Error);
  CHECK_THROWS_AS(contract_current(current_tensor(tensor_product(a, b)), 0, {}), Error);
}

TEST_CASE("contracted currents are future causal") {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const int n = 1 + k % 3;
    const MultiSpinor psi = random_multispinor(rng, n);
    std::vector<FourVector> others;
    for (int j = 0; j < n - 1; ++j) others.push_back(random_future_timelike(rng));
    const int i = static_cast<int>(rng() % n);
    const FourVector j = contract_current(current_tensor(psi), i, others);
    CHECK(minkowski_dot(j, j) >= -1e-9 * j.squaredNorm());
    CHECK(minkowski_dot(j, random_future_timelike(rng)) > 0.0);
  }
}

TEST_CASE("lightlike example spinor gives j proportional to (1,0,0,1)") {
  DiracSpinor s;
  s << 0.5, 0.5, 0.5, -0.5;
  Rng rng(13);
  const MultiSpinor psi = tensor_product(MultiSpinor::from(s), random_multispinor(rng, 1));
  const std::array<FourVector, 1> others{random_future_timelike(rng)};
  const FourVector j = contract_current(current_tensor(psi), 0, others);
  CHECK(j(0) > 0.0);
  CHECK((j / j(0) - FourVector(1, 0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("spinor boosts intertwine gamma matrices with vector boosts") {
  for (int axis = 1; axis <= 3; ++axis) {
    const double chi = 0.7 * axis - 1.1;
    const ComplexMatrix4 S = spinor_boost(chi, axis);
    const LorentzMatrix L = vector_boost(chi, axis);
    for (int mu = 0; mu < 4; ++mu) {
      ComplexMatrix4 rhs = ComplexMatrix4::Zero();
      for (int nu = 0; nu < 4; ++nu) rhs += L(mu, nu) * gamma(nu);
      CHECK((S.inverse() * gamma(mu) * S - rhs).norm() < 1e-12);
    }
    // Lambda preserves the metric
    const Eigen::Matrix4d eta = Eigen::Vector4d(1, -1, -1, -1).asDiagonal();
    CHECK((L.transpose() * eta * L - eta).norm() < 1e-12);
  }
  CHECK_THROWS_AS(spinor_boost(0.1, 0), Error);
  CHECK_THROWS_AS(vector_boost(0.1, 4), Error);
}

TEST_CASE("single-particle current transforms as a vector") {
  Rng rng(17);
  const MultiSpinor psi = random_multispinor(rng, 1);
  const double chi = 1.3;
  const MultiSpinor boosted = apply_to_slot(psi, 0, spinor_boost(chi, 2));
  const FourVector j = current_tensor(psi).components;
  const FourVector jb = current_tensor(boosted).components;
  CHECK((jb - vector_boost(chi, 2) * j).norm() < 1e-12 * jb.norm());
}

TEST_CASE("imaginary residue exposes a broken gamma table") {
  GammaTable broken = standard_gammas();
  broken[1] *= Complex(0.0, 1.0);
  Rng rng(19);
  const MultiSpinor psi = random_multispinor(rng, 2);
  CHECK(imaginary_residue(psi) < 1e-12);
  CHECK(imaginary_residue(psi, broken) > 1e-3);
  CHECK_THROWS_AS(current_tensor(psi, broken), Error);
}
