#pragma once

// Random draws shared by the invariant suite and the tests.

#include <random>

#include "lcbd/wavefunction.hpp"

namespace lcbd {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline MultiSpinor random_multispinor(Rng& rng, int particles) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd a(tensor_size(particles));
  for (auto& c : a) c = Complex(normal(rng), normal(rng));
  return MultiSpinor(particles, a);
}

inline Vector3 random_direction(Rng& rng) {
  std::normal_distribution<double> normal;
  Vector3 v(normal(rng), normal(rng), normal(rng));
  return v.normalized();
}

/// Future-pointing timelike vector c (1, v) with |v| < max_speed and c in [0.1, 10].
inline FourVector random_future_timelike(Rng& rng, double max_speed = 0.99) {
  const Vector3 v = uniform(rng, 0.0, max_speed) * random_direction(rng);
  return uniform(rng, 0.1, 10.0) * FourVector(1.0, v.x(), v.y(), v.z());
}

/// A few plane-wave modes around one dominant mode, so |psi| stays away from zero.
inline Packet random_packet(Rng& rng, double mass = 1.0, int modes = 4, double max_momentum = 0.8) {
  std::vector<PlaneWaveMode> list;
  for (int k = 0; k < modes; ++k) {
    PlaneWaveMode mode;
    mode.momentum = uniform(rng, 0.0, max_momentum) * random_direction(rng);
    mode.spin = uniform(rng, 0.0, 1.0) < 0.5 ? Spin::Up : Spin::Down;
    const double magnitude = k == 0 ? 1.0 : uniform(rng, 0.0, 0.3);
    mode.amplitude = std::polar(magnitude, uniform(rng, 0.0, 2.0 * M_PI));
    list.push_back(mode);
  }
  return Packet(mass, std::move(list));
}

inline WaveFunction random_wavefunction(Rng& rng, int particles, int terms = 2, double mass = 1.0) {
  std::vector<Term> list;
  for (int t = 0; t < terms; ++t) {
    Term term;
    term.coefficient = std::polar(uniform(rng, 0.5, 1.0), uniform(rng, 0.0, 2.0 * M_PI));
    for (int i = 0; i < particles; ++i) term.factors.push_back(random_packet(rng, mass));
    list.push_back(std::move(term));
  }
  return WaveFunction(std::move(list));
}

}  // namespace lcbd
