#include "lcbd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <sstream>

namespace lcbd {

void IntegratorConfig::validate() const {
  const bool finite = std::isfinite(dt) && std::isfinite(t_start) && std::isfinite(t_end) &&
                      std::isfinite(lightlike_tol) && std::isfinite(delay_min) && std::isfinite(psi_zero_tol);
  if (!finite) throw Error(ErrorKind::InvalidArgument, "non-finite integrator setting");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(t_end < t_start)) throw Error(ErrorKind::InvalidArgument, "t_end must lie below t_start");
  if (lightlike_tol < 0.0 || delay_min < 0.0 || psi_zero_tol < 0.0)
    throw Error(ErrorKind::InvalidArgument, "tolerances must be non-negative");
}

long IntegratorConfig::steps() const { return static_cast<long>(std::ceil((t_start - t_end) / dt - 1e-9)); }

void InvariantLog::record(double speed, double relative_psi) {
  ++evaluations;
  max_speed = std::max(max_speed, speed);
  min_lightlike_margin = std::min(min_lightlike_margin, 1.0 - speed);
  min_relative_psi = std::min(min_relative_psi, relative_psi);
}

SystemState SystemState::from_boundary(const BoundaryData& boundary) {
  if (boundary.positions.empty() || boundary.positions.size() != boundary.velocities.size())
    throw Error(ErrorKind::InvalidArgument, "boundary needs one position and one velocity per particle");
  SystemState state;
  for (std::size_t k = 0; k < boundary.positions.size(); ++k)
    state.trajectories.emplace_back(Sample{boundary.t_start, boundary.positions[k], boundary.velocities[k], std::nullopt});
  return state;
}

std::vector<Vector3> SystemState::positions() const {
  std::vector<Vector3> out;
  for (const auto& traj : trajectories) out.push_back(traj.frontier().position);
  return out;
}

Vector3 guidance_velocity(const MultiSpinor& psi, int i, std::span<const FourVector> others, double psi_scale,
                          const IntegratorConfig& config, InvariantLog* log) {
  const double psi_norm = psi.norm();
  if (!(psi_norm > config.psi_zero_tol * psi_scale)) {
    std::ostringstream msg;
    msg << "|psi| = " << psi_norm << " (scale " << psi_scale << ")";
    throw Error(ErrorKind::PsiZero, msg.str());
  }
  FourVector j = contract_current(current_tensor(psi), i, others);
  // Only the line R j matters; orient it future-pointing.
  if (j(0) < 0.0) j = -j;
  if (!(j(0) > 0.0)) throw Error(ErrorKind::PsiZero, "current has vanishing time component");
  const Vector3 v = j.tail<3>() / j(0);
  const double speed = v.norm();
  if (log) log->record(speed, psi_norm / psi_scale);
  if (!(1.0 - speed >= config.lightlike_tol)) {
    std::ostringstream msg;
    msg << "1 - |v| = " << (1.0 - speed) << " below " << config.lightlike_tol;
    throw Error(ErrorKind::Lightlike, msg.str());
  }
  return v;
}

Vector3 velocity(int i, const FourVector& p_i, std::span<const Trajectory> trajectories, const WaveFunction& wf,
                 const IntegratorConfig& config, InvariantLog* log, std::span<const BreakPin> pins) {
  const int n = static_cast<int>(trajectories.size());
  if (n != wf.particles()) throw Error(ErrorKind::InvalidArgument, "one trajectory per particle required");

  RetardedOptions options;
  options.initial_window = config.dt;
  options.delay_min = config.delay_min;
  options.extrapolate = true;

  std::vector<FourVector> events(n);
  std::vector<FourVector> others;
  others.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j == i) {
      events[j] = p_i;
      continue;
    }
    RetardedOptions pinned = options;
    for (const auto& pin : pins) {
      if (pin.particle != j) continue;
      (pin.side == BreakPin::Side::Later ? pinned.smooth_from : pinned.smooth_to) = pin.t;
    }
    const RetardedPoint rp = retarded_point(trajectories[j], p_i, pinned);
    events[j] = rp.event();
    others.push_back(rp.four_velocity());
  }
  return guidance_velocity(evaluate_multi(wf, events), i, others, wf.magnitude_bound(), config, log);
}

std::vector<Vector3> rk4_positions(double t, double h, std::span<const Vector3> positions, const VelocityField& field) {
  const std::size_t n = positions.size();
  const auto shifted = [&](const std::vector<Vector3>& k, double scale) {
    std::vector<Vector3> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = positions[i] + scale * k[i];
    return out;
  };
  const auto k1 = field(t, positions);
  const auto k2 = field(t + 0.5 * h, shifted(k1, 0.5 * h));
  const auto k3 = field(t + 0.5 * h, shifted(k2, 0.5 * h));
  const auto k4 = field(t + h, shifted(k3, h));
  std::vector<Vector3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = positions[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

namespace {

// One particle's share of a step. Within a step particle i only reads the
// stored history of the others, so particles advance independently.
class ParticleStepper {
 public:
  ParticleStepper(const SystemState& state, int i, const WaveFunction& wf, const IntegratorConfig& config,
                  InvariantLog* log)
      : state_(state), i_(i), wf_(wf), config_(config), log_(log) {}

  std::vector<Sample> advance(double t, double t_new) {
    std::vector<Sample> out;
    double cur = t;
    Vector3 x = state_.trajectories[i_].frontier().position;
    std::vector<BreakPin> upper;  // breaks at `cur`, seen from below
    while (true) {
      const auto next = next_break(cur, x, upper, t_new);
      if (!next) break;
      std::vector<BreakPin> pins = upper;
      pins.push_back(next->pin);
      const Vector3 xb = substep(cur, x, next->t, pins);
      const Vector3 v_above = field(next->t, xb, pins);
      BreakPin below = next->pin;
      below.side = BreakPin::Side::Earlier;
      upper = {below};
      const Vector3 v_below = field(next->t, xb, upper);
      out.push_back(Sample{next->t, xb, v_below, v_above});
      cur = next->t;
      x = xb;
    }
    const Vector3 x_new = substep(cur, x, t_new, upper);
    out.push_back(Sample{t_new, x_new, field(t_new, x_new, upper), std::nullopt});
    return out;
  }

 private:
  struct Break {
    double t;
    BreakPin pin;
  };

  Vector3 field(double t, const Vector3& x, std::span<const BreakPin> pins) const {
    try {
      return velocity(i_, four_vector(t, x), state_.trajectories, wf_, config_, log_, pins);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "particle " << i_ << " at t = " << t << ", x = (" << x.transpose() << "): " << e.what();
      throw Error(e.kind(), msg.str());
    }
  }

  Vector3 substep(double t, const Vector3& x, double t_to, std::span<const BreakPin> pins) const {
    const std::array<Vector3, 1> start{x};
    const VelocityField f = [&](double time, std::span<const Vector3> p) {
      return std::vector<Vector3>{field(time, p[0], pins)};
    };
    return rk4_positions(t, t_to - t, start, f)[0];
  }

  double retarded_time(int j, double t, const Vector3& x, std::span<const BreakPin> pins) const {
    RetardedOptions options;
    options.initial_window = config_.dt;
    options.delay_min = config_.delay_min;
    options.extrapolate = true;
    for (const auto& pin : pins)
      if (pin.particle == j) (pin.side == BreakPin::Side::Later ? options.smooth_from : options.smooth_to) = pin.t;
    return retarded_point(state_.trajectories[j], four_vector(t, x), options).t;
  }

  // Largest time in (t_new, cur) at which the retarded time on another world
  // line crosses one of its breaking points.
  std::optional<Break> next_break(double cur, const Vector3& x, std::span<const BreakPin> upper, double t_new) const {
    std::optional<Break> best;
    const double guard = 1e-9 * config_.dt;
    std::optional<Vector3> v_cur;
    for (int j = 0; j < state_.particles(); ++j) {
      if (j == i_) continue;
      const auto& breaks = state_.trajectories[j].breaks();
      if (breaks.empty() || breaks.back() <= t_new) continue;
      if (!v_cur) v_cur = field(cur, x, upper);
      const double r_cur = retarded_time(j, cur, x, upper);
      const double r_pred = retarded_time(j, t_new, x + (t_new - cur) * *v_cur, upper);
      // the Euler prediction is off by O(dt^2); widen the window by a full step
      const auto first = std::upper_bound(breaks.begin(), breaks.end(), r_pred - config_.dt);
      for (auto it = first; it != breaks.end() && *it < r_cur; ++it) {
        const double b = *it;
        std::vector<BreakPin> pins(upper.begin(), upper.end());
        pins.push_back(BreakPin{j, b, BreakPin::Side::Later});
        if (r_cur - b <= 0.0) continue;
        const auto gap = [&](double tau) { return retarded_time(j, tau, substep(cur, x, tau, pins), pins) - b; };
        double lo = t_new, hi = cur;
        double g_lo = gap(lo), g_hi = r_cur - b;
        if (g_lo >= 0.0) continue;
        // Illinois false position on the monotone gap
        int side = 0;
        double tau = hi;
        for (int iter = 0; iter < 100 && hi - lo > 4e-16 * (1.0 + std::abs(hi)); ++iter) {
          tau = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
          if (!(tau > lo && tau < hi)) tau = 0.5 * (lo + hi);
          const double g = gap(tau);
          if (g == 0.0) break;
          if (g < 0.0) {
            lo = tau;
            g_lo = g;
            if (side == -1) g_hi *= 0.5;
            side = -1;
          } else {
            hi = tau;
            g_hi = g;
            if (side == 1) g_lo *= 0.5;
            side = 1;
          }
        }
        if (tau <= t_new + guard || tau >= cur - guard) continue;
        if (!best || tau > best->t) best = Break{tau, BreakPin{j, b, BreakPin::Side::Later}};
      }
    }
    return best;
  }

  const SystemState& state_;
  int i_;
  const WaveFunction& wf_;
  const IntegratorConfig& config_;
  InvariantLog* log_;
};

}  // namespace

double grid_time(double t_start, double h, long k, double t_end) {
  const double t = t_start + static_cast<double>(k) * h;
  return std::abs(t - t_end) <= 1e-9 * std::abs(h) ? t_end : t;
}

void step(SystemState& state, const WaveFunction& wf, const IntegratorConfig& config, InvariantLog* log) {
  const double t = state.t();
  const double t_seed = state.trajectories.front().seed().t;
  const long k = std::lround((t_seed - t) / config.dt);
  const double t_new = grid_time(t_seed, -config.dt, k + 1, config.t_end);

  std::vector<std::vector<Sample>> fresh(state.particles());
  for (int i = 0; i < state.particles(); ++i) fresh[i] = ParticleStepper(state, i, wf, config, log).advance(t, t_new);
  for (int i = 0; i < state.particles(); ++i)
    for (const auto& sample : fresh[i]) state.trajectories[i].append_sample(sample);
  if (log) ++log->steps;
}

RunResult resume(SystemState state, const WaveFunction& wf, const IntegratorConfig& config) {
  config.validate();
  RunResult result;
  const double stop = config.t_end + 1e-9 * config.dt;
  try {
    while (state.t() > stop) step(state, wf, config, &result.log);
  } catch (const Error& e) {
    result.failure = RunFailure{e.kind(), e.what(), state.t()};
  }
  result.trajectories = std::move(state.trajectories);
  return result;
}

RunResult run(const WaveFunction& wf, const BoundaryData& boundary, const IntegratorConfig& config) {
  config.validate();
  SystemState state = SystemState::from_boundary(boundary);
  if (state.particles() != wf.particles())
    throw Error(ErrorKind::InvalidArgument, "boundary data and wave function disagree on particle count");

  double violation = 0.0;
  std::optional<RunFailure> initial_failure;
  try {
    // At t_start every retarded point lies on the seed lines.
    std::vector<Vector3> v_law(state.particles());
    for (int i = 0; i < state.particles(); ++i)
      v_law[i] = velocity(i, four_vector(boundary.t_start, boundary.positions[i]), state.trajectories, wf, config);
    for (int i = 0; i < state.particles(); ++i) {
      violation = std::max(violation, (v_law[i] - boundary.velocities[i]).norm());
      state.trajectories[i].set_departure_velocity(v_law[i]);
    }
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "at t = " << boundary.t_start << ": " << e.what();
    initial_failure = RunFailure{e.kind(), msg.str(), boundary.t_start};
  }

  RunResult result = resume(std::move(state), wf, config);
  result.initial_violation = violation;
  if (initial_failure && !result.failure) result.failure = initial_failure;
  return result;
}

}  // namespace lcbd
