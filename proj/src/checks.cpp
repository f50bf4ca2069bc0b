#include "lcbd/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>

#include "lcbd/dynamics.hpp"
#include "lcbd/ensemble.hpp"
#include "lcbd/random.hpp"
#include "lcbd/reference_bd.hpp"

namespace lcbd {

namespace {

CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult result{name, false, "", 0.0};
  try {
    auto [passed, detail] = body();
    result.passed = passed;
    result.detail = std::move(detail);
  } catch (const std::exception& e) {
    result.detail = std::string("exception: ") + e.what();
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

Rng engine(const CheckOptions& options, std::uint64_t salt) { return Rng(options.seed * 0x9E3779B97F4A7C15ULL + salt); }

std::string describe(std::initializer_list<std::pair<const char*, double>> values) {
  std::ostringstream out;
  out.precision(3);
  bool first = true;
  for (const auto& [key, value] : values) {
    out << (first ? "" : ", ") << key << " = " << value;
    first = false;
  }
  return out.str();
}

// Delay of the light-cone crossing of x0 + v (t - t0) from event p, solved
// directly from |x0 + v (t - t0) - p| = t - p^0 as a quadratic in t.
double quadratic_crossing_time(const Vector3& x0, const Vector3& v, double t0, const FourVector& p) {
  const Vector3 w = x0 - v * t0 - p.tail<3>();
  const double a = v.squaredNorm() - 1.0;
  const double b = 2.0 * (w.dot(v) + p(0));
  const double c = w.squaredNorm() - p(0) * p(0);
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  // a < 0: the larger root is the crossing in the future of p.
  const double r1 = (-b + disc) / (2.0 * a);
  const double r2 = (-b - disc) / (2.0 * a);
  return std::max(r1, r2);
}

}  // namespace

CheckResult check_anticommutation(const CheckOptions& options) {
  return timed("gamma anticommutation", [&] {
    const double eta[4] = {1.0, -1.0, -1.0, -1.0};
    int failures = 0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const ComplexMatrix4 anti = options.gammas[mu] * options.gammas[nu] + options.gammas[nu] * options.gammas[mu];
        const ComplexMatrix4 expected = (mu == nu ? 2.0 * eta[mu] : 0.0) * ComplexMatrix4::Identity();
        if (anti != expected) ++failures;
      }
    return std::pair{failures == 0, describe({{"mismatched pairs", failures}})};
  });
}

CheckResult check_reality(const CheckOptions& options) {
  return timed("current tensor reality", [&] {
    Rng rng = engine(options, 11);
    double worst = 0.0;
    for (int k = 0; k < options.algebra_draws; ++k) {
      const int n = 1 + k % 3;
      worst = std::max(worst, imaginary_residue(random_multispinor(rng, n), options.gammas));
    }
    return std::pair{worst < 1e-10, describe({{"max |Im|/(1+|Re|)", worst}})};
  });
}

CheckResult check_causal_character(const CheckOptions& options) {
  return timed("causal character (timelike or lightlike, lambda > 0)", [&] {
    Rng rng = engine(options, 12);
    int violations = 0;
    double worst_norm = std::numeric_limits<double>::infinity();
    double min_lambda = std::numeric_limits<double>::infinity();
    for (int k = 0; k < options.algebra_draws; ++k) {
      const int n = 1 + k % 3;
      const MultiSpinor psi = random_multispinor(rng, n);
      const int i = static_cast<int>(rng() % n);
      std::vector<FourVector> others;
      for (int j = 0; j < n - 1; ++j) others.push_back(random_future_timelike(rng));
      const FourVector u_i = random_future_timelike(rng);

      const FourVector j = contract_current(current_tensor(psi, options.gammas), i, others);
      const double norm2 = j.squaredNorm();
      const double minkowski = minkowski_dot(j, j);
      const double lambda = timelike_certificate(j, u_i);
      worst_norm = std::min(worst_norm, minkowski / norm2);
      min_lambda = std::min(min_lambda, lambda / u_i(0));
      if (minkowski < -1e-9 * norm2 || !(lambda > 0.0)) ++violations;
    }
    return std::pair{violations == 0, describe({{"violations", violations},
                                                {"min eta(j,j)/|j|^2", worst_norm},
                                                {"min lambda/u^0", min_lambda}})};
  });
}

CheckResult check_lightlike_example(const CheckOptions& options) {
  return timed("lightlike example 1/2(1,1,1,-1) x psi'", [&] {
    Rng rng = engine(options, 13);
    DiracSpinor special;
    special << 0.5, 0.5, 0.5, -0.5;
    double worst = 0.0;
    for (int k = 0; k < options.lightlike_draws; ++k) {
      const int rest = 1 + k % 2;
      const MultiSpinor psi = tensor_product(MultiSpinor::from(special), random_multispinor(rng, rest));
      std::vector<FourVector> others;
      for (int j = 0; j < rest; ++j) others.push_back(random_future_timelike(rng));
      const FourVector j1 = contract_current(current_tensor(psi, options.gammas), 0, others);
      const FourVector direction = j1 / j1(0);
      worst = std::max(worst, (direction - FourVector(1.0, 0.0, 0.0, 1.0)).cwiseAbs().maxCoeff());
    }
    return std::pair{worst < 1e-12, describe({{"max |j/j^0 - (1,0,0,1)|", worst}})};
  });
}

CheckResult check_covariance(const CheckOptions& options) {
  return timed("Lorentz covariance of the contraction", [&] {
    Rng rng = engine(options, 14);
    double worst = 0.0;
    for (int k = 0; k < options.covariance_draws; ++k) {
      const int n = 1 + k % 3;
      const MultiSpinor psi = random_multispinor(rng, n);
      const int i = static_cast<int>(rng() % n);

      // Independent boost per tangent space, cycling through the three axes.
      std::vector<ComplexMatrix4> spin_ops;
      std::vector<LorentzMatrix> vector_ops;
      for (int slot = 0; slot < n; ++slot) {
        const int axis = 1 + (k + slot) % 3;
        const double rapidity = uniform(rng, -2.0, 2.0);
        spin_ops.push_back(spinor_boost(rapidity, axis));
        vector_ops.push_back(vector_boost(rapidity, axis));
      }
      std::vector<FourVector> others, boosted_others;
      for (int slot = 0, o = 0; slot < n; ++slot) {
        if (slot == i) continue;
        others.push_back(random_future_timelike(rng));
        boosted_others.push_back(vector_ops[slot] * others[o++]);
      }
      const FourVector original = contract_current(current_tensor(psi), i, others);
      const FourVector boosted = contract_current(current_tensor(apply_product(psi, spin_ops)), i, boosted_others);
      const FourVector expected = vector_ops[i] * original;
      worst = std::max(worst, (boosted - expected).norm() / expected.norm());
    }
    return std::pair{worst < 1e-8, describe({{"max relative error", worst}})};
  });
}

CheckResult check_retarded_oracle(const CheckOptions& options) {
  return timed("retarded point vs closed-form quadratic", [&] {
    Rng rng = engine(options, 15);
    double worst = 0.0;
    double worst_unique = 0.0;
    for (int k = 0; k < options.retarded_draws; ++k) {
      const Vector3 v = uniform(rng, 0.0, 0.95) * random_direction(rng);
      const Vector3 x0 = uniform(rng, -2.0, 2.0) * random_direction(rng);
      // Sampled backwards from t = 0 so that most roots fall in the stored history.
      Trajectory line(Sample{0.0, x0, v, std::nullopt});
      const double dt = uniform(rng, 0.01, 0.2);
      for (int s = 1; s * dt <= 30.0; ++s) line.append_sample(-s * dt, x0 - v * (s * dt), v);

      const double p0 = uniform(rng, -20.0, -1.0);
      const Vector3 on_line = x0 + v * p0;
      const FourVector p = four_vector(p0, on_line + uniform(rng, 0.05, 5.0) * random_direction(rng));

      const RetardedPoint found = retarded_point(line, p);
      const double oracle = quadratic_crossing_time(x0, v, 0.0, p);
      worst = std::max(worst, std::abs(found.t - oracle) / (1.0 + std::abs(oracle)));

      RetardedOptions narrow;
      narrow.initial_window = 1e-3;
      RetardedOptions wide;
      wide.initial_window = 7.0;
      worst_unique = std::max(worst_unique, std::abs(retarded_point(line, p, narrow).t - retarded_point(line, p, wide).t));
    }
    return std::pair{worst < 1e-10 && worst_unique < 1e-9,
                     describe({{"max |t - t_oracle|/(1+|t|)", worst}, {"max bracket dependence", worst_unique}})};
  });
}

CheckResult check_asymptotic_curve(const CheckOptions&) {
  return timed("curve (t,0,0,sqrt(1+t^2)) never crosses the light cone", [&] {
    const AnalyticWorldLine hyperbola{
        [](double t) { return Vector3(0.0, 0.0, std::sqrt(1.0 + t * t)); },
        [](double t) { return Vector3(0.0, 0.0, t / std::sqrt(1.0 + t * t)); },
    };
    try {
      const RetardedPoint rp = retarded_point(hyperbola, FourVector::Zero());
      return std::pair{false, describe({{"unexpected root t", rp.t}})};
    } catch (const Error& e) {
      return std::pair{e.kind() == ErrorKind::NoCrossing, std::string(e.what())};
    }
  });
}

double dirac_residual_order(const WaveFunction& wf, std::span<const FourVector> events, int slot, double h0) {
  const auto& g = standard_gammas();
  const Complex I(0.0, 1.0);
  const MultiSpinor centre = evaluate_multi(wf, events);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int level = 0; level < 3; ++level) {
    const double h = h0 / std::pow(2.0, level);
    Eigen::VectorXcd residual = -wf.mass() * centre.amplitudes;
    for (int mu = 0; mu < 4; ++mu) {
      std::vector<FourVector> plus(events.begin(), events.end());
      std::vector<FourVector> minus(events.begin(), events.end());
      plus[slot](mu) += h;
      minus[slot](mu) -= h;
      const Eigen::VectorXcd derivative =
          (evaluate_multi(wf, plus).amplitudes - evaluate_multi(wf, minus).amplitudes) / (2.0 * h);
      residual += apply_to_slot(MultiSpinor(wf.particles(), I * derivative), slot, g[mu]).amplitudes;
    }
    const double x = std::log(h), y = std::log(residual.norm());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
}

CheckResult check_dirac_residual(const CheckOptions& options) {
  return timed("multi-time Dirac residual order", [&] {
    Rng rng = engine(options, 16);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < options.residual_draws; ++k) {
      const int n = 1 + k % 3;
      const WaveFunction wf = random_wavefunction(rng, n);
      std::vector<FourVector> events;
      for (int i = 0; i < n; ++i)
        events.push_back(four_vector(uniform(rng, -3.0, 3.0), uniform(rng, 0.0, 3.0) * random_direction(rng)));
      for (int slot = 0; slot < n; ++slot) worst = std::min(worst, dirac_residual_order(wf, events, slot));
    }
    return std::pair{worst >= 1.9, describe({{"min observed order", worst}})};
  });
}

CheckResult check_n1_reduction(const CheckOptions& options) {
  return timed("N=1 reduction to the Dirac current flow", [&] {
    Rng rng = engine(options, 17);
    double worst = 0.0;
    for (int k = 0; k < options.reduction_packets; ++k) {
      const WaveFunction wf = WaveFunction::product({random_packet(rng)});
      const std::vector<Vector3> x0{uniform(rng, 0.0, 2.0) * random_direction(rng)};
      IntegratorConfig config;
      config.dt = options.reduction_dt;
      config.t_start = 0.0;
      config.t_end = -options.reduction_span / wf.mass();

      const RunResult reference = bd_run(wf, config.t_start, x0, config);
      const RunResult retarded = run(wf, BoundaryData{config.t_start, x0, bd_velocities(0.0, x0, wf, config)}, config);
      if (!reference.ok()) return std::pair{false, "reference run failed: " + reference.failure->message};
      if (!retarded.ok()) return std::pair{false, "retarded run failed: " + retarded.failure->message};

      const double lowest = std::max(reference.trajectories[0].earliest(), retarded.trajectories[0].earliest());
      const auto metrics = compare(retarded.trajectories, reference.trajectories, uniform_grid(lowest, 0.0, 1001));
      worst = std::max(worst, metrics.max_dist);
    }
    return std::pair{worst < 1e-8, describe({{"max position deviation", worst}})};
  });
}

CheckResult check_replay(const CheckOptions& options) {
  return timed("replay from stored history is bitwise identical", [&] {
    (void)options;
    const FamilyMember member = canonical_entangled(0.3);
    IntegratorConfig full = member.config;
    full.t_end = -3.0;
    IntegratorConfig first_half = full;
    first_half.t_end = -1.5;

    const BoundaryData boundary{full.t_start, member.positions,
                                bd_velocities(full.t_start, member.positions, member.wf, full)};
    const RunResult reference = run(member.wf, boundary, full);
    const RunResult head = run(member.wf, boundary, first_half);
    if (!reference.ok() || !head.ok()) return std::pair{false, std::string("run failed")};
    const RunResult tail = resume(SystemState{head.trajectories}, member.wf, full);
    if (!tail.ok()) return std::pair{false, "resume failed: " + tail.failure->message};

    long compared = 0;
    long mismatched = 0;
    for (std::size_t i = 0; i < reference.trajectories.size(); ++i) {
      const auto& a = reference.trajectories[i].samples();
      const auto& b = tail.trajectories[i].samples();
      if (a.size() != b.size()) return std::pair{false, std::string("sample counts differ")};
      for (std::size_t s = 0; s < a.size(); ++s) {
        ++compared;
        const bool same = std::memcmp(&a[s].t, &b[s].t, sizeof(double)) == 0 &&
                          std::memcmp(a[s].position.data(), b[s].position.data(), 3 * sizeof(double)) == 0 &&
                          std::memcmp(a[s].velocity.data(), b[s].velocity.data(), 3 * sizeof(double)) == 0 &&
                          a[s].velocity_above.has_value() == b[s].velocity_above.has_value() &&
                          std::memcmp(a[s].upper_velocity().data(), b[s].upper_velocity().data(),
                                      3 * sizeof(double)) == 0;
        if (!same) ++mismatched;
      }
    }
    return std::pair{mismatched == 0, describe({{"samples compared", static_cast<double>(compared)},
                                                {"mismatched", static_cast<double>(mismatched)}})};
  });
}

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  return {check_anticommutation(options),  check_reality(options),        check_causal_character(options),
          check_lightlike_example(options), check_covariance(options),     check_retarded_oracle(options),
          check_asymptotic_curve(options),    check_dirac_residual(options), check_n1_reduction(options),
          check_replay(options)};
}

}  // namespace lcbd
