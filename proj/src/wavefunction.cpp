#include "lcbd/wavefunction.hpp"

#include <cmath>
#include <string>

#include "lcbd/error.hpp"

namespace lcbd {

double mode_energy(const Vector3& momentum, double mass) { return std::sqrt(mass * mass + momentum.squaredNorm()); }

DiracSpinor u_spinor(const Vector3& momentum, Spin spin, double mass) {
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  const double energy = mode_energy(momentum, mass);
  const Complex I(0.0, 1.0);
  Eigen::Vector2cd chi = spin == Spin::Up ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
  Eigen::Matrix2cd sigma_p;
  sigma_p << momentum.z(), momentum.x() - I * momentum.y(), momentum.x() + I * momentum.y(), -momentum.z();

  const double norm = std::sqrt(energy + mass);
  DiracSpinor u;
  u.head<2>() = norm * chi;
  u.tail<2>() = (sigma_p * chi) * (norm / (energy + mass));
  return u;
}

Packet::Packet(double mass, std::vector<PlaneWaveMode> modes) : mass_(mass), modes_(std::move(modes)) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorKind::InvalidArgument, "packet mass must be positive");
  if (modes_.empty()) throw Error(ErrorKind::InvalidArgument, "packet needs at least one mode");
  spinors_.reserve(modes_.size());
  energies_.reserve(modes_.size());
  for (const auto& mode : modes_) {
    if (!mode.momentum.allFinite() || !std::isfinite(mode.amplitude.real()) || !std::isfinite(mode.amplitude.imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite plane-wave mode");
    spinors_.push_back(u_spinor(mode.momentum, mode.spin, mass_));
    energies_.push_back(mode_energy(mode.momentum, mass_));
    bound_ += std::abs(mode.amplitude) * spinors_.back().norm();
  }
}

Packet Packet::with_scaled_momenta(double factor) const {
  auto modes = modes_;
  for (auto& mode : modes) mode.momentum *= factor;
  return Packet(mass_, std::move(modes));
}

DiracSpinor evaluate_packet(const Packet& packet, const FourVector& event) {
  const Vector3 x = event.tail<3>();
  DiracSpinor out = DiracSpinor::Zero();
  for (std::size_t k = 0; k < packet.modes_.size(); ++k) {
    const double phase = -(packet.energies_[k] * event(0) - packet.modes_[k].momentum.dot(x));
    out += (packet.modes_[k].amplitude * std::polar(1.0, phase)) * packet.spinors_[k];
  }
  return out;
}

Packet gaussian_packet(double mass, const GaussianPacketSpec& spec) {
  // Per-axis momentum grids and weights; their outer product forms the comb.
  std::vector<double> ks[3];
  std::vector<double> ws[3];
  for (int a = 0; a < 3; ++a) {
    if (spec.sigma_k(a) < 0.0) throw Error(ErrorKind::InvalidArgument, "negative momentum spread");
    const int count = spec.sigma_k(a) > 0.0 ? spec.modes_per_axis(a) : 1;
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "modes_per_axis must be >= 1");
    for (int n = 0; n < count; ++n) {
      const double offset = count == 1 ? 0.0 : spec.sigma_k(a) * spec.span * (2.0 * n / (count - 1) - 1.0);
      ks[a].push_back(spec.momentum(a) + offset);
      ws[a].push_back(spec.sigma_k(a) > 0.0 ? std::exp(-offset * offset / (4.0 * spec.sigma_k(a) * spec.sigma_k(a)))
                                            : 1.0);
    }
  }

  std::vector<PlaneWaveMode> modes;
  for (std::size_t i = 0; i < ks[0].size(); ++i)
    for (std::size_t j = 0; j < ks[1].size(); ++j)
      for (std::size_t l = 0; l < ks[2].size(); ++l) {
        PlaneWaveMode mode;
        mode.momentum = Vector3(ks[0][i], ks[1][j], ks[2][l]);
        mode.spin = spec.spin;
        mode.amplitude = ws[0][i] * ws[1][j] * ws[2][l] * std::polar(1.0, -mode.momentum.dot(spec.center));
        modes.push_back(mode);
      }
  return Packet(mass, std::move(modes));
}

WaveFunction::WaveFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorKind::InvalidArgument, "wave function needs at least one term");
  particles_ = static_cast<int>(terms_.front().factors.size());
  if (particles_ < 1) throw Error(ErrorKind::InvalidArgument, "term without factors");
  mass_ = terms_.front().factors.front().mass();
  for (const auto& term : terms_) {
    if (static_cast<int>(term.factors.size()) != particles_)
      throw Error(ErrorKind::InvalidArgument, "all terms need " + std::to_string(particles_) + " factors");
    double term_bound = std::abs(term.coefficient);
    for (const auto& factor : term.factors) {
      if (factor.mass() != mass_) throw Error(ErrorKind::InvalidArgument, "all factors must share one mass");
      term_bound *= factor.magnitude_bound();
    }
    bound_ += term_bound;
  }
}

WaveFunction WaveFunction::product(std::vector<Packet> factors) {
  return WaveFunction({Term{1.0, std::move(factors)}});
}

WaveFunction WaveFunction::with_scaled_momenta(double factor) const {
  auto terms = terms_;
  for (auto& term : terms)
    for (auto& packet : term.factors) packet = packet.with_scaled_momenta(factor);
  return WaveFunction(std::move(terms));
}

MultiSpinor evaluate_multi(const WaveFunction& wf, std::span<const FourVector> events) {
  const int n = wf.particles();
  if (static_cast<int>(events.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "need one event per particle");
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(tensor_size(n));
  std::vector<DiracSpinor> factors(n);
  for (const auto& term : wf.terms()) {
    for (int k = 0; k < n; ++k) factors[k] = evaluate_packet(term.factors[k], events[k]);
    sum += term.coefficient * tensor_product(factors).amplitudes;
  }
  return MultiSpinor(n, std::move(sum));
}

double density(const WaveFunction& wf, double t, std::span<const Vector3> positions) {
  std::vector<FourVector> events;
  events.reserve(positions.size());
  for (const auto& x : positions) events.push_back(four_vector(t, x));
  return evaluate_multi(wf, events).amplitudes.squaredNorm();
}

}  // namespace lcbd
