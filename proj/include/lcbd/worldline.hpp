#pragma once

// World lines parametrized by lab time, dense Hermite output and the
// retarded-point finder: the crossing of a world line with the future
// lab-time light cone of an event.

#include <deque>
#include <functional>
#include <optional>

#include "lcbd/spinor_core.hpp"

namespace lcbd {

struct KinematicState {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
};

struct Sample {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
  /// Velocity on the smaller-t side of the sample.
  Vector3 velocity = Vector3::Zero();
  /// Limit from larger t where the velocity jumps (a breaking point of the
  /// world line); empty at ordinary samples.
  std::optional<Vector3> velocity_above;

  const Vector3& upper_velocity() const { return velocity_above ? *velocity_above : velocity; }
};

/// Direction in which samples are appended.
enum class TimeDirection { Backward, Forward };

/// Time-ordered samples plus a constant-velocity analytic seed.
///
/// A backward trajectory starts at the seed time, grows towards smaller t and
/// extends beyond the seed as the straight line x_seed + v_seed (t - t_seed).
/// A forward trajectory is the mirror image.
class Trajectory {
 public:
  explicit Trajectory(const Sample& seed, TimeDirection direction = TimeDirection::Backward);

  /// Throws NonMonotonicTime unless t lies strictly beyond every stored sample
  /// in the trajectory's direction; SuperluminalSample if |v| >= 1.
  void append_sample(double t, const Vector3& position, const Vector3& velocity,
                     const std::optional<Vector3>& velocity_above = std::nullopt);
  void append_sample(const Sample& sample) {
    append_sample(sample.t, sample.position, sample.velocity, sample.velocity_above);
  }

  /// Velocity leaving the seed sample towards smaller t (backward only, before
  /// any other sample). A value different from the seed velocity turns the
  /// seed time into a breaking point.
  void set_departure_velocity(const Vector3& velocity);

  /// Times of samples whose velocity jump exceeds `threshold`, ascending.
  const std::vector<double>& breaks() const { return breaks_; }

  const Sample& seed() const { return seed_; }
  TimeDirection direction() const { return direction_; }

  /// Samples in ascending t.
  const std::deque<Sample>& samples() const { return samples_; }
  const Sample& frontier() const;

  double earliest() const { return samples_.front().t; }
  double latest() const { return samples_.back().t; }

  bool covers(double t) const;

  /// Cubic Hermite between bracketing samples; straight-line seed beyond the
  /// seed time. Throws OutOfRange outside the covered domain.
  KinematicState interpolate(double t) const;

  /// As interpolate, but continues the outermost Hermite segment past the
  /// frontier (straight line if only the seed sample exists).
  KinematicState extrapolate(double t) const;

  /// As extrapolate, but never crossing the breaking points `from` (below it,
  /// the segment above is continued) and `to` (above it, the segment below is
  /// continued). Both must be sample times of a backward trajectory.
  KinematicState smooth_extension(double t, std::optional<double> from, std::optional<double> to) const;

  /// Jumps at or below this size are not reported as breaking points.
  static constexpr double break_threshold = 1e-12;

 private:
  KinematicState hermite(std::size_t lower, double t) const;
  std::size_t index_of(double t) const;

  Sample seed_;
  TimeDirection direction_;
  std::deque<Sample> samples_;
  std::vector<double> breaks_;
};

/// World line given in closed form, defined for every t.
struct AnalyticWorldLine {
  std::function<Vector3(double)> position;
  std::function<Vector3(double)> velocity;
};

struct RetardedPoint {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();

  FourVector four_velocity() const { return {1.0, velocity.x(), velocity.y(), velocity.z()}; }
  FourVector event() const { return four_vector(t, position); }
};

struct RetardedOptions {
  /// First bracket width; widened by doubling. The distance at t = p^0 is used when larger.
  double initial_window = 0.0;
  /// Roots with delay below this raise Coincident.
  double delay_min = 1e-9;
  /// Allow queries that reach below the earliest stored sample of a backward trajectory.
  bool extrapolate = false;
  /// Breaking points the query must stay on one side of; see
  /// Trajectory::smooth_extension.
  std::optional<double> smooth_from;
  std::optional<double> smooth_to;
  /// Bracket expansion on analytic world lines stops beyond this delay.
  double max_delay = 1e6;
};

/// Unique t_c > p^0 with t_c - p^0 = |x(t_c) - p|.
/// Throws NoCrossing, Coincident or OutOfRange.
RetardedPoint retarded_point(const Trajectory& traj, const FourVector& p, const RetardedOptions& options = {});
RetardedPoint retarded_point(const AnalyticWorldLine& line, const FourVector& p, const RetardedOptions& options = {});

/// Root of the light-cone condition on the straight line x0 + v (t - t0).
/// Returns the delay t_c - p^0 (always exists for |v| < 1).
double straight_line_delay(const Vector3& x0, const Vector3& v, double t0, const FourVector& p);

}  // namespace lcbd
