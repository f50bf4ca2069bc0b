#include <doctest.h>

#include "lcbd/error.hpp"
#include "lcbd/random.hpp"
#include "lcbd/worldline.hpp"
#include "oracles.hpp"

using namespace lcbd;

namespace {

// Circular motion of radius R and angular speed w (speed R w < 1).
struct Circle {
  double R = 1.0, w = 0.6;
  Vector3 x(double t) const { return {R * std::cos(w * t), R * std::sin(w * t), 0.1 * t}; }
  Vector3 v(double t) const { return {-R * w * std::sin(w * t), R * w * std::cos(w * t), 0.1}; }
};

Trajectory sample_backwards(const Circle& c, double dt, double t_end) {
  Trajectory traj(Sample{0.0, c.x(0.0), c.v(0.0)});
  for (long k = 1; -k * dt >= t_end - 1e-12; ++k) traj.append_sample(-k * dt, c.x(-k * dt), c.v(-k * dt));
  return traj;
}

}  // namespace

TEST_CASE("append_sample enforces time order and subluminality") {
  Trajectory traj(Sample{0.0, Vector3::Zero(), Vector3(0.1, 0, 0)});
  CHECK_NOTHROW(traj.append_sample(-0.01, Vector3(-0.001, 0, 0), Vector3(0.1, 0, 0)));
  CHECK_THROWS_WITH_AS(traj.append_sample(-0.01, Vector3::Zero(), Vector3::Zero()), doctest::Contains("NonMonotonic"),
                       Error);
  try {
    traj.append_sample(-0.02, Vector3::Zero(), Vector3(1.01, 0, 0));
    FAIL("superluminal sample accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SuperluminalSample);
  }
  try {
    traj.append_sample(0.5, Vector3::Zero(), Vector3::Zero());
    FAIL("out-of-order sample accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonMonotonicTime);
  }
  CHECK_THROWS_AS(Trajectory(Sample{0.0, Vector3::Zero(), Vector3(0, 1.0, 0)}), Error);
}

TEST_CASE("forward trajectories grow towards larger t") {
  Trajectory traj(Sample{0.0, Vector3::Zero(), Vector3::Zero()}, TimeDirection::Forward);
  CHECK_NOTHROW(traj.append_sample(0.1, Vector3::Zero(), Vector3::Zero()));
  CHECK_THROWS_AS(traj.append_sample(0.05, Vector3::Zero(), Vector3::Zero()), Error);
  CHECK(traj.frontier().t == 0.1);
}

TEST_CASE("Hermite interpolation reproduces straight lines and stored samples exactly") {
  const Vector3 x0(1, 2, 3), v(0.3, -0.2, 0.1);
  Trajectory traj(Sample{0.0, x0, v});
  for (int k = 1; k <= 10; ++k) traj.append_sample(-0.1 * k, x0 - 0.1 * k * v, v);
  for (double t : {-0.95, -0.55, -0.123, 0.0, 0.4, 17.0}) {
    const auto s = traj.interpolate(t);
    CHECK((s.position - (x0 + v * t)).norm() < 1e-14 * (1.0 + std::abs(t)));
    CHECK((s.velocity - v).norm() < 1e-14);
  }
  for (const auto& sample : traj.samples()) {
    const auto s = traj.interpolate(sample.t);
    CHECK(s.position == sample.position);
    CHECK(s.velocity == sample.velocity);
  }
  CHECK_THROWS_AS(traj.interpolate(-1.0001), Error);
  CHECK(traj.covers(-1.0));
  CHECK_FALSE(traj.covers(-1.1));
}

TEST_CASE("velocity jumps: kinked line is reproduced piecewise and recorded as breaks") {
  // seed line at rest above t = 0; leaves with velocity a, switches to b at t = -1
  const Vector3 a(0.2, 0, 0), b(0, -0.3, 0.1);
  Trajectory traj(Sample{0.0, Vector3::Zero(), Vector3::Zero()});
  traj.set_departure_velocity(a);
  const Vector3 x1 = -a;
  traj.append_sample(Sample{-1.0, x1, b, a});
  traj.append_sample(-2.0, x1 - b, b);
  const std::vector<double> expected{-1.0, 0.0};
  CHECK(traj.breaks() == expected);

  const auto exact = [&](double t) -> Vector3 { return t >= 0 ? Vector3::Zero() : t >= -1 ? Vector3(a * t) : Vector3(x1 + b * (t + 1)); };
  for (double t : {-1.7, -1.0, -0.6, -0.01, 0.0, 0.5}) CHECK((traj.interpolate(t).position - exact(t)).norm() < 1e-14);
  CHECK((traj.interpolate(-0.5).velocity - a).norm() < 1e-14);
  CHECK((traj.interpolate(-1.5).velocity - b).norm() < 1e-14);

  // continuing a segment across a break follows that segment's straight line
  CHECK((traj.smooth_extension(-1.5, -1.0, std::nullopt).position - a * -1.5).norm() < 1e-14);
  CHECK((traj.smooth_extension(-0.5, std::nullopt, -1.0).position - (x1 + b * 0.5)).norm() < 1e-14);
  CHECK((traj.smooth_extension(0.5, std::nullopt, 0.0).position - a * 0.5).norm() < 1e-14);
  CHECK((traj.smooth_extension(-0.5, 0.0, std::nullopt).position).norm() < 1e-14);

  // small numerical wiggles are not breaks
  Trajectory smooth(Sample{0.0, Vector3::Zero(), a});
  smooth.set_departure_velocity(a);
  CHECK(smooth.breaks().empty());
}

TEST_CASE("Hermite mid-step error falls like dt^4") {
  const Circle c;
  std::vector<double> errors;
  for (double dt : {0.2, 0.1, 0.05}) {
    const Trajectory traj = sample_backwards(c, dt, -4.0);
    double worst = 0.0;
    for (double t = -dt / 2; t > -4.0; t -= dt) worst = std::max(worst, (traj.interpolate(t).position - c.x(t)).norm());
    errors.push_back(worst);
  }
  for (std::size_t k = 1; k < errors.size(); ++k) CHECK(std::log2(errors[k - 1] / errors[k]) > 3.8);
}

TEST_CASE("extrapolation continues the outermost segment") {
  const Circle c;
  const Trajectory traj = sample_backwards(c, 0.01, -1.0);
  const double t = traj.earliest() - 0.005;
  CHECK_THROWS_AS(traj.interpolate(t), Error);
  CHECK((traj.extrapolate(t).position - c.x(t)).norm() < 1e-8);
}

TEST_CASE("static particle: light-cone crossing at unit delay") {
  const Trajectory traj(Sample{0.0, Vector3::Zero(), Vector3::Zero()});
  const RetardedPoint rp = retarded_point(traj, FourVector(0.0, 1.0, 0.0, 0.0));
  CHECK(rp.t == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rp.position.norm() == 0.0);
  CHECK(rp.four_velocity() == FourVector(1, 0, 0, 0));
}

TEST_CASE("constant velocity: closed form agrees with independent bisection") {
  const Vector3 v(0.5, 0.0, 0.0);
  const Trajectory traj(Sample{0.0, Vector3::Zero(), v});
  const FourVector p(0.0, -1.0, 0.0, 0.0);
  const RetardedPoint rp = retarded_point(traj, p);
  const double t_bisect = oracle::bisect_crossing([&](double t) { return Vector3(v * t); }, 0.0, Vector3(-1, 0, 0), 100.0);
  CHECK(std::abs(rp.t - t_bisect) < 1e-10);
  // by hand: t = |(-1) - 0.5 t| => t = 2
  CHECK(rp.t == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(straight_line_delay(Vector3::Zero(), v, 0.0, p) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("random straight lines: finder agrees with bisection") {
  Rng rng(21);
  for (int k = 0; k < 300; ++k) {
    const Vector3 x0 = uniform(rng, 0.0, 5.0) * random_direction(rng);
    const Vector3 v = uniform(rng, 0.0, 0.95) * random_direction(rng);
    const double t0 = uniform(rng, -3.0, 3.0);
    const FourVector p = four_vector(t0 + uniform(rng, 0.0, 3.0), uniform(rng, 0.0, 5.0) * random_direction(rng));
    const Trajectory traj(Sample{t0, x0, v});
    const auto line = [&](double t) { return Vector3(x0 + v * (t - t0)); };
    const double expected = oracle::bisect_crossing(line, p(0), p.tail<3>(), 1e3);
    CHECK(std::abs(retarded_point(traj, p).t - expected) < 1e-10 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("roots inside stored history: residual, bracket independence, agreement with the curve") {
  const Circle c;
  const Trajectory traj = sample_backwards(c, 0.01, -10.0);
  const AnalyticWorldLine exact{[&](double t) { return c.x(t); }, [&](double t) { return c.v(t); }};
  Rng rng(23);
  for (int k = 0; k < 200; ++k) {
    const FourVector p = four_vector(uniform(rng, -9.0, -4.0), uniform(rng, 0.2, 3.0) * random_direction(rng));
    RetardedOptions narrow;
    narrow.initial_window = 1e-4;
    RetardedOptions wide;
    wide.initial_window = 5.0;
    const RetardedPoint a = retarded_point(traj, p, narrow);
    const RetardedPoint b = retarded_point(traj, p, wide);
    CHECK(std::abs(a.t - b.t) < 1e-9);
    CHECK(std::abs((a.t - p(0)) - (a.position - p.tail<3>()).norm()) < 1e-12 * (1.0 + a.t - p(0)));
    // interpolation error only
    const double t_exact = oracle::bisect_crossing(exact.position, p(0), p.tail<3>(), 20.0);
    CHECK(std::abs(a.t - t_exact) < 1e-8);
    CHECK(std::abs(retarded_point(exact, p).t - t_exact) < 1e-10);
  }
}

TEST_CASE("hyperbola (t,0,0,sqrt(1+t^2)) never meets the light cone of the origin") {
  const AnalyticWorldLine hyperbola{[](double t) { return Vector3(0, 0, std::sqrt(1 + t * t)); },
                                    [](double t) { return Vector3(0, 0, t / std::sqrt(1 + t * t)); }};
  try {
    retarded_point(hyperbola, FourVector::Zero());
    FAIL("crossing found");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoCrossing);
  }
}

TEST_CASE("coincident events and queries below the history are reported") {
  const Trajectory traj(Sample{0.0, Vector3(1, 0, 0), Vector3::Zero()});
  try {
    retarded_point(traj, FourVector(0.0, 1.0, 0.0, 0.0));
    FAIL("coincident query accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Coincident);
  }
  Trajectory history(Sample{0.0, Vector3::Zero(), Vector3::Zero()});
  history.append_sample(-0.1, Vector3::Zero(), Vector3::Zero());
  try {
    retarded_point(history, FourVector(-5.0, 1.0, 0.0, 0.0));
    FAIL("query below history accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
  RetardedOptions allow;
  allow.extrapolate = true;
  CHECK(retarded_point(history, FourVector(-1.05, 1.0, 0.0, 0.0), allow).t == doctest::Approx(-0.05));
}
