#pragma once

// The retarded guidance law and its integrator.
//
// Particle i at event p_i moves along j_i = J(psi) contracted, for every
// j != i, with eta(., u_j), where psi and u_j are taken at the crossings of
// the other world lines with the future lab-time light cone of p_i. Lab time
// parametrizes every world line, so dx/dt = j_vec / j^0. Integration marches
// towards decreasing t from boundary data given at t_start; every retarded
// query lands in already-computed history or in the straight-line seed.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcbd/error.hpp"
#include "lcbd/wavefunction.hpp"
#include "lcbd/worldline.hpp"

namespace lcbd {

struct IntegratorConfig {
  double dt = 1e-2;
  double t_start = 0.0;
  double t_end = -1.0;
  double lightlike_tol = 1e-6;
  double delay_min = 1e-9;
  double psi_zero_tol = 1e-12;

  /// Throws InvalidArgument on dt <= 0, t_end >= t_start or non-finite values.
  void validate() const;
  /// Number of steps needed to reach t_end (the last step may overshoot by < 1e-9 dt).
  long steps() const;
};

/// Positions and seed velocities at the boundary time.
struct BoundaryData {
  double t_start = 0.0;
  std::vector<Vector3> positions;
  std::vector<Vector3> velocities;
};

/// Running extrema of the per-evaluation invariants.
struct InvariantLog {
  long steps = 0;
  long evaluations = 0;
  double max_speed = 0.0;
  double min_lightlike_margin = 1.0;
  double min_relative_psi = std::numeric_limits<double>::infinity();

  void record(double speed, double relative_psi);
};

/// All N world lines, sharing a common frontier time.
struct SystemState {
  std::vector<Trajectory> trajectories;

  static SystemState from_boundary(const BoundaryData& boundary);

  int particles() const { return static_cast<int>(trajectories.size()); }
  double t() const { return trajectories.front().frontier().t; }
  std::vector<Vector3> positions() const;
};

/// Velocity from an already evaluated spinor: j_i = contract_current(J(psi), i, others), v = j_vec / j^0.
/// Throws PsiZero when |psi| <= psi_zero_tol * psi_scale and Lightlike when 1 - |v| < lightlike_tol.
Vector3 guidance_velocity(const MultiSpinor& psi, int i, std::span<const FourVector> others, double psi_scale,
                          const IntegratorConfig& config, InvariantLog* log = nullptr);

/// Keeps retarded queries on `particle`'s world line on one side of its
/// velocity jump at `t`: Later continues the segment above t, Earlier the one below.
struct BreakPin {
  enum class Side { Earlier, Later };
  int particle = 0;
  double t = 0.0;
  Side side = Side::Later;
};

/// Retarded-law velocity of particle i at event p_i.
Vector3 velocity(int i, const FourVector& p_i, std::span<const Trajectory> trajectories, const WaveFunction& wf,
                 const IntegratorConfig& config, InvariantLog* log = nullptr, std::span<const BreakPin> pins = {});

using VelocityField = std::function<std::vector<Vector3>(double t, std::span<const Vector3> positions)>;

/// Time of the k-th step from t_start with signed step h. Computed from k
/// rather than accumulated, and snapped onto t_end when within 1e-9 |h|, so
/// runs end exactly at t_end when (t_end - t_start) / h is an integer.
double grid_time(double t_start, double h, long k, double t_end);

/// Classical RK4 position update over signed step h; returns the new positions.
std::vector<Vector3> rk4_positions(double t, double h, std::span<const Vector3> positions, const VelocityField& field);

/// Advance every trajectory by one step of -dt and append the new samples.
///
/// The law is of neutral type: a velocity jump on one world line (the seed
/// time, when the seed velocity disagrees with the law) reappears on every
/// other world line whose retarded time crosses it, and never smooths out.
/// Such breaking points inside the step are located to round-off, the step is
/// split there and the point is stored with both one-sided velocities, which
/// keeps RK4 and the Hermite history at full order.
/// Errors are rethrown with particle, time and cause in the message.
void step(SystemState& state, const WaveFunction& wf, const IntegratorConfig& config, InvariantLog* log = nullptr);

struct RunFailure {
  ErrorKind kind;
  std::string message;
  double t;
};

struct RunResult {
  std::vector<Trajectory> trajectories;
  InvariantLog log;
  /// max_i |v_law(t_start) - v_seed| for particle i.
  double initial_violation = 0.0;
  std::optional<RunFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Integrate from boundary data at config.t_start down to config.t_end.
/// Failures stop the run; the partial trajectories are returned with the cause.
RunResult run(const WaveFunction& wf, const BoundaryData& boundary, const IntegratorConfig& config);

/// Continue a stored state down to config.t_end.
RunResult resume(SystemState state, const WaveFunction& wf, const IntegratorConfig& config);

}  // namespace lcbd
