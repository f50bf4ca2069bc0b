#include <doctest.h>

#include "lcbd/checks.hpp"
#include "lcbd/error.hpp"
#include "lcbd/random.hpp"
#include "lcbd/wavefunction.hpp"
#include "oracles.hpp"

using namespace lcbd;

namespace {

// gamma^mu p_mu = E gamma^0 - p . gamma_vec
Eigen::Matrix4cd slash(double E, const Vector3& p) {
  return E * oracle::gamma(0) - p.x() * oracle::gamma(1) - p.y() * oracle::gamma(2) - p.z() * oracle::gamma(3);
}

}  // namespace

TEST_CASE("u spinors solve the momentum-space Dirac equation") {
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    const Vector3 p = uniform(rng, 0.0, 3.0) * random_direction(rng);
    const double m = uniform(rng, 0.2, 2.0);
    const double E = std::sqrt(m * m + p.squaredNorm());
    CHECK(mode_energy(p, m) == doctest::Approx(E));
    for (Spin s : {Spin::Up, Spin::Down}) {
      const DiracSpinor u = u_spinor(p, s, m);
      CHECK((slash(E, p) * u - m * u).norm() < 1e-12 * (1.0 + E) * u.norm());
      CHECK(u.squaredNorm() == doctest::Approx(2.0 * E));
      // u-bar u = 2m
      CHECK(u.dot(oracle::gamma(0) * u).real() == doctest::Approx(2.0 * m));
    }
  }
}

TEST_CASE("plane-wave current is 2 p^mu, so v = p / E") {
  const Vector3 p(0.3, -0.4, 1.2);
  const double m = 1.0, E = std::sqrt(1.0 + p.squaredNorm());
  const Packet wave(m, {PlaneWaveMode{p, Spin::Down, 1.0}});
  const DiracSpinor psi = evaluate_packet(wave, FourVector(0.7, 1.0, 2.0, -3.0));
  const FourVector j = current_tensor(MultiSpinor::from(psi)).components;
  CHECK((j - 2.0 * FourVector(E, p.x(), p.y(), p.z())).norm() < 1e-12);
}

TEST_CASE("packet evaluation carries the phase exp(-i(Et - p.x))") {
  const Vector3 p(0.5, 0.0, -0.25);
  const Complex amp(0.3, -0.7);
  const Packet wave(2.0, {PlaneWaveMode{p, Spin::Up, amp}});
  const FourVector x(1.5, -2.0, 0.5, 3.0);
  const double E = mode_energy(p, 2.0);
  const Complex phase = std::exp(Complex(0.0, -(E * x(0) - p.dot(x.tail<3>()))));
  CHECK((evaluate_packet(wave, x) - amp * phase * u_spinor(p, Spin::Up, 2.0)).norm() < 1e-13);
  CHECK(wave.magnitude_bound() >= evaluate_packet(wave, x).norm());
}

TEST_CASE("multi-time evaluation is the sum of tensor products of factors") {
  Rng rng(2);
  const WaveFunction wf = random_wavefunction(rng, 2, 3);
  const std::vector<FourVector> events{FourVector(0.1, 1, 2, 3), FourVector(-0.4, 0, -1, 0.5)};
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(16);
  for (const auto& term : wf.terms())
    expected += term.coefficient * oracle::kron(evaluate_packet(term.factors[0], events[0]),
                                                evaluate_packet(term.factors[1], events[1]));
  CHECK((evaluate_multi(wf, events).amplitudes - expected).norm() < 1e-13 * expected.norm());
  CHECK(wf.magnitude_bound() >= expected.norm());

  const std::vector<Vector3> x{events[0].tail<3>(), events[1].tail<3>()};
  const std::vector<FourVector> same_time{four_vector(0.2, x[0]), four_vector(0.2, x[1])};
  CHECK(density(wf, 0.2, x) == doctest::Approx(evaluate_multi(wf, same_time).amplitudes.squaredNorm()));
}

TEST_CASE("wave-function construction is validated") {
  const Packet a(1.0, {PlaneWaveMode{}});
  const Packet heavy(2.0, {PlaneWaveMode{}});
  CHECK_THROWS_AS(WaveFunction({}), Error);
  CHECK_THROWS_AS(WaveFunction({Term{1.0, {a}}, Term{1.0, {a, a}}}), Error);
  CHECK_THROWS_AS(WaveFunction::product({a, heavy}), Error);
  CHECK_THROWS_AS(Packet(-1.0, {PlaneWaveMode{}}), Error);
  CHECK_THROWS_AS(Packet(1.0, {}), Error);
  const WaveFunction wf = WaveFunction::product({a, a});
  const std::vector<FourVector> one{FourVector::Zero()};
  CHECK_THROWS_AS(evaluate_multi(wf, one), Error);
}

TEST_CASE("Gaussian comb peaks at its centre and has the requested modes") {
  GaussianPacketSpec spec;
  spec.center = Vector3(1.0, -2.0, 0.5);
  spec.momentum = Vector3(0.2, 0.0, 0.0);
  spec.sigma_k = Vector3(0.4, 0.3, 0.0);
  spec.modes_per_axis = Eigen::Vector3i(7, 5, 9);
  const Packet packet = gaussian_packet(1.0, spec);
  CHECK(packet.modes().size() == 35u);
  const double at_centre = evaluate_packet(packet, four_vector(0.0, spec.center)).norm();
  for (const Vector3 offset : {Vector3(1.5, 0, 0), Vector3(0, -2, 0), Vector3(-1, 1, 0)})
    CHECK(evaluate_packet(packet, four_vector(0.0, spec.center + offset)).norm() < at_centre);
  // no spread along z: translation invariant along that axis
  CHECK(evaluate_packet(packet, four_vector(0.0, spec.center + Vector3(0, 0, 7))).norm() ==
        doctest::Approx(at_centre).epsilon(1e-12));
}

TEST_CASE("scaling momenta scales every mode") {
  Rng rng(4);
  const Packet p = random_packet(rng);
  const Packet q = p.with_scaled_momenta(0.5);
  for (std::size_t k = 0; k < p.modes().size(); ++k)
    CHECK((q.modes()[k].momentum - 0.5 * p.modes()[k].momentum).norm() < 1e-15);
}

TEST_CASE("finite-difference Dirac residual converges at second order in every slot") {
  Rng rng(6);
  for (int n = 1; n <= 3; ++n) {
    const WaveFunction wf = random_wavefunction(rng, n);
    std::vector<FourVector> events;
    for (int i = 0; i < n; ++i) events.push_back(four_vector(uniform(rng, -2, 2), 2.0 * random_direction(rng)));
    for (int slot = 0; slot < n; ++slot) CHECK(dirac_residual_order(wf, events, slot) >= 1.9);
  }
}
