#include "lcbd/reference_bd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lcbd {

Vector3 bd_velocity(int i, double t, std::span<const Vector3> positions, const WaveFunction& wf,
                    const IntegratorConfig& config, InvariantLog* log) {
  const int n = wf.particles();
  if (static_cast<int>(positions.size()) != n) throw Error(ErrorKind::InvalidArgument, "one position per particle");
  std::vector<FourVector> events;
  for (const auto& x : positions) events.push_back(four_vector(t, x));
  const std::vector<FourVector> time_axis(n - 1, FourVector(1.0, 0.0, 0.0, 0.0));
  return guidance_velocity(evaluate_multi(wf, events), i, time_axis, wf.magnitude_bound(), config, log);
}

std::vector<Vector3> bd_velocities(double t, std::span<const Vector3> positions, const WaveFunction& wf,
                                   const IntegratorConfig& config, InvariantLog* log) {
  std::vector<Vector3> v(positions.size());
  for (int i = 0; i < static_cast<int>(positions.size()); ++i) {
    try {
      v[i] = bd_velocity(i, t, positions, wf, config, log);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "particle " << i << " at t = " << t << ", x = (" << positions[i].transpose() << "): " << e.what();
      throw Error(e.kind(), msg.str());
    }
  }
  return v;
}

RunResult bd_run(const WaveFunction& wf, double t_start, std::span<const Vector3> positions,
                 const IntegratorConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.t_end) || !std::isfinite(t_start) || config.t_end == t_start)
    throw Error(ErrorKind::InvalidArgument, "bad Bohm-Dirac run settings");
  if (static_cast<int>(positions.size()) != wf.particles())
    throw Error(ErrorKind::InvalidArgument, "one position per particle");

  const TimeDirection direction = config.t_end < t_start ? TimeDirection::Backward : TimeDirection::Forward;
  const double h = direction == TimeDirection::Backward ? -config.dt : config.dt;
  const VelocityField field = [&](double t, std::span<const Vector3> x) { return bd_velocities(t, x, wf, config); };

  RunResult result;
  std::vector<Vector3> x(positions.begin(), positions.end());
  double t = t_start;
  try {
    const auto v0 = bd_velocities(t, x, wf, config, &result.log);
    for (std::size_t k = 0; k < x.size(); ++k) result.trajectories.emplace_back(Sample{t, x[k], v0[k], std::nullopt}, direction);

    const double remaining = std::abs(config.t_end - t_start);
    const long steps = static_cast<long>(std::ceil(remaining / config.dt - 1e-9));
    for (long s = 0; s < steps; ++s) {
      const double t_next = grid_time(t_start, h, s + 1, config.t_end);
      x = rk4_positions(t, t_next - t, x, field);
      t = t_next;
      const auto v = bd_velocities(t, x, wf, config, &result.log);
      for (std::size_t k = 0; k < x.size(); ++k) result.trajectories[k].append_sample(t, x[k], v[k]);
      ++result.log.steps;
    }
  } catch (const Error& e) {
    result.failure = RunFailure{e.kind(), e.what(), t};
  }
  return result;
}

ComparisonMetrics compare(std::span<const Trajectory> a, std::span<const Trajectory> b, std::span<const double> t_grid) {
  if (a.size() != b.size() || a.empty()) throw Error(ErrorKind::DomainMismatch, "trajectory sets differ in size");
  if (t_grid.empty()) throw Error(ErrorKind::DomainMismatch, "empty comparison grid");
  const auto sampled = [](const Trajectory& traj, double t) { return t >= traj.earliest() && t <= traj.latest(); };

  ComparisonMetrics metrics;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<double> series;
    series.reserve(t_grid.size());
    for (double t : t_grid) {
      if (!sampled(a[i], t) || !sampled(b[i], t)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside the sampled range of particle " << i;
        throw Error(ErrorKind::DomainMismatch, msg.str());
      }
      const double d = (a[i].interpolate(t).position - b[i].interpolate(t).position).norm();
      metrics.max_dist = std::max(metrics.max_dist, d);
      total += d;
      series.push_back(d);
    }
    metrics.per_particle.push_back(std::move(series));
  }
  metrics.mean_dist = total / static_cast<double>(a.size() * t_grid.size());
  return metrics;
}

std::vector<double> uniform_grid(double t0, double t1, int count) {
  if (count < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) grid[k] = t0 + (t1 - t0) * k / (count - 1);
  grid.back() = t1;
  return grid;
}

}  // namespace lcbd
