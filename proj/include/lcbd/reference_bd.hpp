#pragma once

// Equal-time Bohm-Dirac guidance in the lab frame: every index of J but the
// particle's own is contracted with the lab time axis. For one particle this
// is the flow of the Dirac current, which transports |psi|^2.

#include <span>
#include <vector>

#include "lcbd/dynamics.hpp"

namespace lcbd {

Vector3 bd_velocity(int i, double t, std::span<const Vector3> positions, const WaveFunction& wf,
                    const IntegratorConfig& config = {}, InvariantLog* log = nullptr);

std::vector<Vector3> bd_velocities(double t, std::span<const Vector3> positions, const WaveFunction& wf,
                                   const IntegratorConfig& config = {}, InvariantLog* log = nullptr);

/// Integrate the equal-time law from `positions` at config.t_start to
/// config.t_end, which may lie on either side of t_start. Samples carry the
/// law velocity, including the first one.
RunResult bd_run(const WaveFunction& wf, double t_start, std::span<const Vector3> positions,
                 const IntegratorConfig& config);

struct ComparisonMetrics {
  double max_dist = 0.0;
  double mean_dist = 0.0;
  /// per_particle[i][k]: distance of particle i at grid point k.
  std::vector<std::vector<double>> per_particle;
};

/// Distances between matching particles on a common time grid.
/// Throws DomainMismatch if the particle counts differ or any grid time lies
/// outside either set's sampled range.
ComparisonMetrics compare(std::span<const Trajectory> a, std::span<const Trajectory> b, std::span<const double> t_grid);

/// count >= 2 evenly spaced times from t0 to t1 inclusive.
std::vector<double> uniform_grid(double t0, double t1, int count);

}  // namespace lcbd
