#include "lcbd/worldline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lcbd/error.hpp"

namespace lcbd {

namespace {

void check_subluminal(const Vector3& v, double t) {
  if (!v.allFinite() || !(v.norm() < 1.0)) {
    std::ostringstream msg;
    msg << "|v| = " << v.norm() << " at t = " << t;
    throw Error(ErrorKind::SuperluminalSample, msg.str());
  }
}

KinematicState straight_line(const Sample& s, double t) { return {s.position + s.velocity * (t - s.t), s.velocity}; }

double light_cone_gap(const FourVector& p, double t, const Vector3& x) { return (t - p(0)) - (x - p.tail<3>()).norm(); }

// Locate the root of the light-cone gap on [lo, hi] with gap(lo) < 0 <= gap(hi).
// Newton steps on g' = 1 - v.n are kept only when they stay inside the bracket.
template <typename StateAt>
double refine_root(const StateAt& state_at, const FourVector& p, double lo, double hi) {
  double t = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const KinematicState s = state_at(t);
    const Vector3 r = s.position - p.tail<3>();
    const double dist = r.norm();
    const double g = (t - p(0)) - dist;
    if (g < 0.0)
      lo = t;
    else
      hi = t;
    if (g == 0.0 || hi - lo <= 4e-16 * (1.0 + std::abs(hi))) break;

    const double slope = dist > 0.0 ? 1.0 - s.velocity.dot(r) / dist : 1.0;
    double next = slope > 0.0 ? t - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

RetardedPoint finish(const KinematicState& s, double t, const FourVector& p, const RetardedOptions& options) {
  if (t - p(0) < options.delay_min) {
    std::ostringstream msg;
    msg << "delay " << (t - p(0)) << " below " << options.delay_min << " at p = (" << p.transpose() << ")";
    throw Error(ErrorKind::Coincident, msg.str());
  }
  return {t, s.position, s.velocity};
}

}  // namespace

Trajectory::Trajectory(const Sample& seed, TimeDirection direction) : seed_(seed), direction_(direction) {
  if (!std::isfinite(seed.t) || !seed.position.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite seed");
  check_subluminal(seed.velocity, seed.t);
  samples_.push_back(seed);
}

const Sample& Trajectory::frontier() const {
  return direction_ == TimeDirection::Backward ? samples_.front() : samples_.back();
}

void Trajectory::append_sample(double t, const Vector3& position, const Vector3& velocity,
                               const std::optional<Vector3>& velocity_above) {
  const bool ordered = direction_ == TimeDirection::Backward ? t < earliest() : t > latest();
  if (!ordered || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "t = " << t << " does not extend the trajectory beyond " << frontier().t;
    throw Error(ErrorKind::NonMonotonicTime, msg.str());
  }
  if (!position.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite position");
  check_subluminal(velocity, t);
  if (velocity_above) check_subluminal(*velocity_above, t);
  const Sample sample{t, position, velocity, velocity_above};
  const bool jump = velocity_above && (*velocity_above - velocity).norm() > break_threshold;
  if (direction_ == TimeDirection::Backward) {
    samples_.push_front(sample);
    if (jump) breaks_.insert(breaks_.begin(), t);
  } else {
    samples_.push_back(sample);
    if (jump) breaks_.push_back(t);
  }
}

void Trajectory::set_departure_velocity(const Vector3& velocity) {
  if (direction_ != TimeDirection::Backward || samples_.size() != 1)
    throw Error(ErrorKind::InvalidArgument, "departure velocity must be set on a fresh backward trajectory");
  check_subluminal(velocity, seed_.t);
  Sample& s = samples_.front();
  s.velocity = velocity;
  s.velocity_above = seed_.velocity;
  breaks_.clear();
  if ((velocity - seed_.velocity).norm() > break_threshold) breaks_.push_back(seed_.t);
}

bool Trajectory::covers(double t) const {
  return direction_ == TimeDirection::Backward ? t >= earliest() : t <= latest();
}

KinematicState Trajectory::hermite(std::size_t lower, double t) const {
  const Sample& a = samples_[lower];
  const Sample& b = samples_[lower + 1];
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;

  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;

  KinematicState out;
  // one-sided derivatives: leaving a upwards, arriving at b from below
  const Vector3& va = a.upper_velocity();
  const Vector3& vb = b.velocity;
  out.position = h00 * a.position + (h10 * h) * va + h01 * b.position + (h11 * h) * vb;
  out.velocity = (d00 / h) * a.position + d10 * va + (d01 / h) * b.position + d11 * vb;
  return out;
}

KinematicState Trajectory::interpolate(double t) const {
  if (!covers(t)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside trajectory domain (frontier " << frontier().t << ")";
    throw Error(ErrorKind::OutOfRange, msg.str());
  }
  return extrapolate(t);
}

KinematicState Trajectory::extrapolate(double t) const {
  const bool seed_side = direction_ == TimeDirection::Backward ? t > seed_.t : t < seed_.t;
  if (seed_side) return straight_line(seed_, t);
  if (samples_.size() == 1) {
    const Sample& s = samples_.front();
    return {s.position + s.velocity * (t - s.t), s.velocity};
  }

  if (t <= samples_.front().t) return hermite(0, t);
  if (t >= samples_.back().t) return hermite(samples_.size() - 2, t);
  const auto upper = std::upper_bound(samples_.begin(), samples_.end(), t,
                                      [](double value, const Sample& s) { return value < s.t; });
  const auto lower = static_cast<std::size_t>(std::distance(samples_.begin(), upper)) - 1;
  if (samples_[lower].t == t) return {samples_[lower].position, samples_[lower].velocity};
  return hermite(lower, t);
}

std::size_t Trajectory::index_of(double t) const {
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), t, [](const Sample& s, double value) { return s.t < value; });
  if (it == samples_.end() || it->t != t) throw Error(ErrorKind::InvalidArgument, "breaking point is not a sample time");
  return static_cast<std::size_t>(std::distance(samples_.begin(), it));
}

KinematicState Trajectory::smooth_extension(double t, std::optional<double> from, std::optional<double> to) const {
  if (from && t < *from) {
    const std::size_t k = index_of(*from);
    return k + 1 == samples_.size() ? straight_line(seed_, t) : hermite(k, t);
  }
  if (to && t > *to) {
    const std::size_t k = index_of(*to);
    if (k > 0) return hermite(k - 1, t);
    const Sample& s = samples_[k];
    return {s.position + s.velocity * (t - s.t), s.velocity};
  }
  return extrapolate(t);
}

double straight_line_delay(const Vector3& x0, const Vector3& v, double t0, const FourVector& p) {
  const Vector3 d = x0 + v * (p(0) - t0) - p.tail<3>();
  const double dv = d.dot(v);
  const double d2 = d.squaredNorm();
  const double a = 1.0 - v.squaredNorm();
  if (!(a > 0.0)) throw Error(ErrorKind::NoCrossing, "straight line is not timelike");
  const double disc = std::sqrt(dv * dv + a * d2);
  // Both forms are the positive root; pick the one without cancellation.
  return dv >= 0.0 ? (dv + disc) / a : (d2 > 0.0 ? d2 / (disc - dv) : 0.0);
}

RetardedPoint retarded_point(const Trajectory& traj, const FourVector& p, const RetardedOptions& options) {
  if (traj.direction() != TimeDirection::Backward)
    throw Error(ErrorKind::InvalidArgument, "retarded queries need a backward trajectory");
  if (!p.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite query event");
  if (!options.extrapolate && p(0) < traj.earliest()) {
    std::ostringstream msg;
    msg << "query time " << p(0) << " below earliest sample " << traj.earliest();
    throw Error(ErrorKind::OutOfRange, msg.str());
  }

  const Sample& seed = traj.seed();
  const auto seed_root = [&] {
    const double delay = straight_line_delay(seed.position, seed.velocity, seed.t, p);
    const double t = p(0) + delay;
    return finish(straight_line(seed, t), t, p, options);
  };

  // Pinned above the seed time the world line is the seed line throughout;
  // pinned below it, the seed line must not be used at all.
  if (options.smooth_from && *options.smooth_from == seed.t) return seed_root();
  const bool below_seed = options.smooth_to && *options.smooth_to == seed.t;
  if (!below_seed) {
    if (p(0) >= seed.t) return seed_root();
    if (light_cone_gap(p, seed.t, seed.position) < 0.0) return seed_root();
  }

  const bool pinned = options.smooth_from || options.smooth_to;
  const auto state_at = [&](double t) {
    return pinned ? traj.smooth_extension(t, options.smooth_from, options.smooth_to) : traj.extrapolate(t);
  };
  const double cap = below_seed ? std::numeric_limits<double>::infinity() : seed.t;
  double lo = p(0);
  const double distance = (state_at(lo).position - p.tail<3>()).norm();
  if (distance == 0.0) return finish(state_at(lo), lo, p, options);

  double window = std::max(options.initial_window, distance);
  double hi = std::min(p(0) + window, cap);
  while (light_cone_gap(p, hi, state_at(hi).position) < 0.0) {
    lo = hi;
    window *= 2.0;
    hi = std::min(p(0) + window, cap);
  }
  const double t = refine_root(state_at, p, lo, hi);
  return finish(state_at(t), t, p, options);
}

RetardedPoint retarded_point(const AnalyticWorldLine& line, const FourVector& p, const RetardedOptions& options) {
  const auto state_at = [&](double t) { return KinematicState{line.position(t), line.velocity(t)}; };
  double lo = p(0);
  const double distance = (state_at(lo).position - p.tail<3>()).norm();
  if (distance == 0.0) return finish(state_at(lo), lo, p, options);

  double window = std::max({options.initial_window, distance, 1e-12});
  double hi = p(0) + window;
  while (light_cone_gap(p, hi, state_at(hi).position) < 0.0) {
    if (window > options.max_delay) {
      std::ostringstream msg;
      msg << "no light-cone crossing within delay " << options.max_delay << " of p = (" << p.transpose() << ")";
      throw Error(ErrorKind::NoCrossing, msg.str());
    }
    lo = hi;
    window *= 2.0;
    hi = p(0) + window;
  }
  const double t = refine_root(state_at, p, lo, hi);
  return finish(state_at(t), t, p, options);
}

}  // namespace lcbd
