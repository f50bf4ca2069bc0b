#pragma once

// Exact free solutions of the multi-time Dirac equation built from
// positive-energy plane waves. There is no external potential: every slot
// obeys (i gamma^mu d_mu - m) psi = 0 independently.

#include <span>
#include <vector>

#include "lcbd/spinor_core.hpp"

namespace lcbd {

enum class Spin { Up, Down };

struct PlaneWaveMode {
  Vector3 momentum = Vector3::Zero();
  Spin spin = Spin::Up;
  Complex amplitude = 1.0;
};

/// Single-particle factor: a finite sum of plane-wave modes of mass m.
class Packet {
 public:
  Packet(double mass, std::vector<PlaneWaveMode> modes);

  double mass() const { return mass_; }
  const std::vector<PlaneWaveMode>& modes() const { return modes_; }

  /// Upper bound on |phi| anywhere in space-time.
  double magnitude_bound() const { return bound_; }

  /// Copy with every mode momentum multiplied by `factor`.
  Packet with_scaled_momenta(double factor) const;

 private:
  double mass_;
  std::vector<PlaneWaveMode> modes_;
  std::vector<DiracSpinor> spinors_;
  std::vector<double> energies_;
  double bound_ = 0.0;

  friend DiracSpinor evaluate_packet(const Packet& packet, const FourVector& event);
};

/// Parameters of a Gaussian-weighted comb of plane waves.
///
/// Along each axis with sigma_k > 0 the comb has `modes_per_axis` momenta
/// spread uniformly over k0 +- span * sigma_k with weights
/// exp(-(k - k0)^2 / (4 sigma_k^2)); the packet is centred at `center` at t = 0.
/// Axes with sigma_k == 0 carry a single mode (plane-wave direction).
struct GaussianPacketSpec {
  Vector3 center = Vector3::Zero();
  Vector3 momentum = Vector3::Zero();
  Vector3 sigma_k = Vector3::Zero();
  Eigen::Vector3i modes_per_axis{9, 9, 9};
  double span = 3.0;
  Spin spin = Spin::Up;
};

Packet gaussian_packet(double mass, const GaussianPacketSpec& spec);

struct Term {
  Complex coefficient = 1.0;
  std::vector<Packet> factors;
};

/// psi(x_1, ..., x_N) = sum_terms c_t phi_{t,1}(x_1) \otimes ... \otimes phi_{t,N}(x_N).
class WaveFunction {
 public:
  explicit WaveFunction(std::vector<Term> terms);

  static WaveFunction product(std::vector<Packet> factors);

  int particles() const { return particles_; }
  double mass() const { return mass_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Upper bound on |psi|; the reference scale for "psi vanishes" tests.
  double magnitude_bound() const { return bound_; }

  WaveFunction with_scaled_momenta(double factor) const;

 private:
  std::vector<Term> terms_;
  int particles_;
  double mass_;
  double bound_ = 0.0;
};

/// sqrt(E + m) (chi_s ; (sigma . p) chi_s / (E + m)), normalized to u^dagger u = 2E.
DiracSpinor u_spinor(const Vector3& momentum, Spin spin, double mass);

double mode_energy(const Vector3& momentum, double mass);

DiracSpinor evaluate_packet(const Packet& packet, const FourVector& event);

/// One event per particle, each carrying its own time coordinate.
MultiSpinor evaluate_multi(const WaveFunction& wf, std::span<const FourVector> events);

/// Equal-time density psi^dagger psi = J^{0...0}.
double density(const WaveFunction& wf, double t, std::span<const Vector3> positions);

}  // namespace lcbd
