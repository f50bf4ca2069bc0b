#include "lcbd/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace lcbd {

namespace {

int points_per_axis(long budget, int dims, int minimum = 2) {
  if (dims == 0) return 1;
  return std::max(minimum, static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / dims) + 1e-9)));
}

// Midpoint grid over the active axes of `box` with `per_axis` cells per axis;
// calls fn(q, cell_volume) for every cell centre.
template <typename Fn>
void for_each_cell(const SamplingBox& box, const std::vector<int>& axes, int per_axis, Fn&& fn) {
  const int d = static_cast<int>(axes.size());
  Eigen::VectorXd q = box.lower;
  double volume = 1.0;
  std::vector<double> width(d);
  for (int a = 0; a < d; ++a) {
    width[a] = (box.upper(axes[a]) - box.lower(axes[a])) / per_axis;
    volume *= width[a];
  }
  std::vector<int> idx(d, 0);
  while (true) {
    for (int a = 0; a < d; ++a) q(axes[a]) = box.lower(axes[a]) + (idx[a] + 0.5) * width[a];
    fn(q, volume);
    int a = d - 1;
    while (a >= 0 && ++idx[a] == per_axis) idx[a--] = 0;
    if (a < 0) break;
  }
}

double density_at(const WaveFunction& wf, double t, const Eigen::VectorXd& q) {
  const auto positions = unpack_configuration(q);
  return density(wf, t, positions);
}

double box_mass(const WaveFunction& wf, double t, const SamplingBox& box, const std::vector<int>& axes, long budget) {
  double mass = 0.0;
  for_each_cell(box, axes, points_per_axis(budget, static_cast<int>(axes.size()), 4),
                [&](const Eigen::VectorXd& q, double volume) { mass += density_at(wf, t, q) * volume; });
  return mass;
}

// Maximum of rho over the box: grid scan followed by a compass search around
// the best few grid points.
double density_maximum(const WaveFunction& wf, double t, const SamplingBox& box, const std::vector<int>& axes,
                       long budget) {
  const int per_axis = points_per_axis(budget, static_cast<int>(axes.size()), 8);
  std::vector<std::pair<double, Eigen::VectorXd>> best;
  for_each_cell(box, axes, per_axis, [&](const Eigen::VectorXd& q, double) {
    best.emplace_back(density_at(wf, t, q), q);
    if (best.size() > 64) {
      std::nth_element(best.begin(), best.begin() + 8, best.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      best.resize(8);
    }
  });
  std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (best.size() > 8) best.resize(8);

  double maximum = 0.0;
  for (auto [value, q] : best) {
    std::vector<double> step;
    for (int a : axes) step.push_back(0.5 * (box.upper(a) - box.lower(a)) / per_axis);
    for (int round = 0; round < 30; ++round) {
      bool improved = false;
      for (std::size_t k = 0; k < axes.size(); ++k) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd trial = q;
          trial(axes[k]) = std::clamp(trial(axes[k]) + sign * step[k], box.lower(axes[k]), box.upper(axes[k]));
          const double v = density_at(wf, t, trial);
          if (v > value) {
            value = v;
            q = trial;
            improved = true;
          }
        }
      }
      if (!improved)
        for (auto& s : step) s *= 0.5;
    }
    maximum = std::max(maximum, value);
  }
  return maximum;
}

}  // namespace

std::vector<int> SamplingBox::active_axes() const {
  std::vector<int> axes;
  for (int k = 0; k < dimension(); ++k)
    if (upper(k) > lower(k)) axes.push_back(k);
  return axes;
}

void SamplingBox::validate(int particles) const {
  if (lower.size() != 3 * particles || upper.size() != 3 * particles)
    throw Error(ErrorKind::InvalidArgument, "sampling box needs 3N lower and upper bounds");
  if (!lower.allFinite() || !upper.allFinite() || (upper.array() < lower.array()).any())
    throw Error(ErrorKind::InvalidArgument, "sampling box bounds must be finite with lower <= upper");
  if (active_axes().empty()) throw Error(ErrorKind::InvalidArgument, "sampling box has no extent");
}

SamplingBox SamplingBox::scaled(double factor) const {
  const Eigen::VectorXd centre = 0.5 * (lower + upper);
  const Eigen::VectorXd half = 0.5 * factor * (upper - lower);
  return {centre - half, centre + half};
}

std::vector<Vector3> unpack_configuration(const Eigen::VectorXd& q) {
  std::vector<Vector3> out(q.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = q.segment<3>(3 * i);
  return out;
}

double box_mass_fraction(const WaveFunction& wf, double t, const SamplingBox& box, long budget) {
  box.validate(wf.particles());
  const auto axes = box.active_axes();
  const double inner = box_mass(wf, t, box, axes, budget);
  const double outer = box_mass(wf, t, box.scaled(1.5), axes, budget);
  return outer > 0.0 ? inner / outer : 0.0;
}

SampleSet sample(const WaveFunction& wf, double t, int count, const SamplingBox& box, std::uint64_t rng_seed,
                 const SamplerOptions& options) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  box.validate(wf.particles());
  const auto axes = box.active_axes();

  const double fraction = box_mass_fraction(wf, t, box, options.scan_budget);
  if (fraction < options.min_mass_fraction) {
    std::ostringstream msg;
    msg << "box holds only " << fraction << " of the density mass at t = " << t;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }

  SampleSet set;
  set.t = t;
  set.rng_seed = rng_seed;
  set.envelope = options.envelope_factor * density_maximum(wf, t, box, axes, options.scan_budget);
  if (!(set.envelope > 0.0)) throw Error(ErrorKind::PsiZero, "density vanishes throughout the box");

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long attempts = 0;
  const long max_attempts = std::max<long>(1000000, 100000L * count);
  Eigen::VectorXd q = box.lower;
  while (static_cast<int>(set.configurations.size()) < count) {
    if (++attempts > max_attempts) throw Error(ErrorKind::EnvelopeExceeded, "rejection sampler made no progress");
    for (int a : axes) q(a) = box.lower(a) + (box.upper(a) - box.lower(a)) * unit(rng);
    const double u = set.envelope * unit(rng);
    const double rho = density_at(wf, t, q);
    if (rho > set.envelope) {
      std::ostringstream msg;
      msg << "density " << rho << " above envelope " << set.envelope << "; refine the scan or shrink the box";
      throw Error(ErrorKind::EnvelopeExceeded, msg.str());
    }
    if (u < rho) set.configurations.push_back(q);
  }
  set.acceptance = static_cast<double>(count) / static_cast<double>(attempts);
  set.low_acceptance = set.acceptance < options.low_acceptance;
  return set;
}

BinnedDensity::BinnedDensity(const SamplingBox& box, int bins)
    : box_(box), axes_(box.active_axes()), bins_(bins), joint_(box.active_axes().size() <= 2) {
  if (bins < 1) throw Error(ErrorKind::InvalidArgument, "need at least one bin per axis");
  if (axes_.empty()) throw Error(ErrorKind::InvalidArgument, "histogram box has no extent");
}

std::vector<std::size_t> BinnedDensity::bin_of(const Eigen::VectorXd& q) const {
  // Returns one flat bin per histogram; bins_^d (joint) or bins_ (marginal) means overflow.
  const auto axis_bin = [&](int a) -> long {
    const double s = (q(a) - box_.lower(a)) / (box_.upper(a) - box_.lower(a));
    if (!(s >= 0.0 && s <= 1.0)) return -1;
    return std::min<long>(bins_ - 1, static_cast<long>(s * bins_));
  };
  std::vector<std::size_t> out;
  if (joint_) {
    std::size_t flat = 0;
    std::size_t overflow = 1;
    bool outside = false;
    for (int a : axes_) {
      const long b = axis_bin(a);
      outside = outside || b < 0;
      flat = flat * bins_ + static_cast<std::size_t>(std::max<long>(b, 0));
      overflow *= bins_;
    }
    out.push_back(outside ? overflow : flat);
  } else {
    for (int a : axes_) {
      const long b = axis_bin(a);
      out.push_back(b < 0 ? static_cast<std::size_t>(bins_) : static_cast<std::size_t>(b));
    }
  }
  return out;
}

std::vector<std::vector<double>> BinnedDensity::reference(const WaveFunction& wf, double t, long budget) const {
  const int d = static_cast<int>(axes_.size());
  std::vector<std::vector<double>> hist;
  int per_axis = 0;
  if (joint_) {
    std::size_t cells = 1;
    for (int k = 0; k < d; ++k) cells *= bins_;
    hist.assign(1, std::vector<double>(cells + 1, 0.0));
    const int sub = std::clamp(points_per_axis(budget, d, 1) / bins_, 1, 64);
    per_axis = sub * bins_;
  } else {
    hist.assign(d, std::vector<double>(bins_ + 1, 0.0));
    per_axis = std::max(bins_, points_per_axis(budget, d, 1));
  }

  double total = 0.0;
  for_each_cell(box_, axes_, per_axis, [&](const Eigen::VectorXd& q, double volume) {
    const double w = density_at(wf, t, q) * volume;
    total += w;
    const auto b = bin_of(q);
    for (std::size_t h = 0; h < hist.size(); ++h) hist[h][b[h]] += w;
  });
  for (auto& h : hist)
    for (auto& p : h) p /= total;
  return hist;
}

std::vector<std::vector<double>> BinnedDensity::empirical(std::span<const Eigen::VectorXd> configurations) const {
  std::vector<std::vector<double>> hist;
  if (joint_) {
    std::size_t cells = 1;
    for (std::size_t k = 0; k < axes_.size(); ++k) cells *= bins_;
    hist.assign(1, std::vector<double>(cells + 1, 0.0));
  } else {
    hist.assign(axes_.size(), std::vector<double>(bins_ + 1, 0.0));
  }
  if (configurations.empty()) return hist;
  const double w = 1.0 / static_cast<double>(configurations.size());
  for (const auto& q : configurations) {
    const auto b = bin_of(q);
    for (std::size_t h = 0; h < hist.size(); ++h) hist[h][b[h]] += w;
  }
  return hist;
}

double BinnedDensity::l1_distance(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q) {
  if (p.size() != q.size()) throw Error(ErrorKind::InvalidArgument, "histogram shapes differ");
  double sum = 0.0;
  for (std::size_t h = 0; h < p.size(); ++h) {
    if (p[h].size() != q[h].size()) throw Error(ErrorKind::InvalidArgument, "histogram shapes differ");
    for (std::size_t k = 0; k < p[h].size(); ++k) sum += std::abs(p[h][k] - q[h][k]);
  }
  return sum;
}

std::string to_string(TransportModel model) {
  switch (model) {
    case TransportModel::BohmDirac: return "bohm-dirac";
    case TransportModel::Retarded: return "retarded";
    case TransportModel::Frozen: return "frozen";
  }
  return "unknown";
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::clamp(jobs, 1, std::max(1, count));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (int k = w; k < count; k += jobs) {
        try {
          body(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

// Transports one configuration from t0 to each checkpoint time.
std::vector<Eigen::VectorXd> transport_member(const WaveFunction& wf, const Eigen::VectorXd& q0, double t0,
                                              std::span<const double> times, TransportModel model,
                                              const TransportOptions& options) {
  std::vector<Eigen::VectorXd> out(times.size(), q0);
  const double t1 = times.back();
  if (model == TransportModel::Frozen || t1 == t0) return out;

  const auto positions = unpack_configuration(q0);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t1 - t0) / options.dt - 1e-9)));
  IntegratorConfig config = options.tolerances;
  config.dt = std::abs(t1 - t0) / static_cast<double>(steps);
  config.t_start = t0;
  config.t_end = t1;

  RunResult result;
  if (model == TransportModel::BohmDirac) {
    result = bd_run(wf, t0, positions, config);
  } else {
    BoundaryData boundary{t0, positions, bd_velocities(t0, positions, wf, config)};
    result = run(wf, boundary, config);
  }
  if (result.failure) throw Error(result.failure->kind, result.failure->message);

  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
      const auto& traj = result.trajectories[i];
      const double t = std::clamp(times[k], traj.earliest(), traj.latest());
      out[k].segment<3>(3 * i) = traj.interpolate(t).position;
    }
  }
  return out;
}

}  // namespace

TransportReport transport_test(const WaveFunction& wf, double t0, double t1, int count, TransportModel model,
                               const TransportOptions& options) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "ensemble count must be positive");
  if (options.bootstrap < 2) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least two resamples");
  if (!(options.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (model == TransportModel::Retarded && !(t1 < t0))
    throw Error(ErrorKind::InvalidArgument, "retarded transport runs towards smaller t");
  const SamplingBox& box1 = options.box1.dimension() > 0 ? options.box1 : options.box0;

  TransportReport report;
  report.model = model;
  report.particles = wf.particles();
  report.count = count;
  report.t0 = t0;
  report.t1 = t1;

  const SampleSet initial = sample(wf, t0, count, options.box0, options.rng_seed, options.sampler);
  report.acceptance = initial.acceptance;

  const std::vector<double> times{t1};
  std::vector<Eigen::VectorXd> moved(count);
  parallel_for(count, options.jobs, [&](int k) {
    moved[k] = transport_member(wf, initial.configurations[k], t0, times, model, options).back();
  });

  const BinnedDensity bins(box1, options.bins);
  const auto reference = bins.reference(wf, t1);
  TransportPoint point;
  point.t = t1;
  point.distance = BinnedDensity::l1_distance(bins.empirical(moved), reference);

  // Noise floor: L1 distance of independent direct draws from rho(t1).
  std::vector<double> floor(options.bootstrap);
  for (int b = 0; b < options.bootstrap; ++b) {
    const std::uint64_t seed = options.rng_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(b + 1);
    const SampleSet direct = sample(wf, t1, count, box1, seed, options.sampler);
    floor[b] = BinnedDensity::l1_distance(bins.empirical(direct.configurations), reference);
  }
  const double mean = std::accumulate(floor.begin(), floor.end(), 0.0) / floor.size();
  double var = 0.0;
  for (double f : floor) var += (f - mean) * (f - mean);
  point.noise_mean = mean;
  point.noise_std = std::sqrt(var / (floor.size() - 1));
  report.series.push_back(point);
  return report;
}

TransportReport equivariance_test(const WaveFunction& wf, double t0, double t1, int count,
                                  const TransportOptions& options) {
  if (wf.particles() != 1) throw Error(ErrorKind::InvalidArgument, "equivariance test is for one particle");
  return transport_test(wf, t0, t1, count, TransportModel::BohmDirac, options);
}

TransportReport nonconservation_probe(const WaveFunction& wf, double t0, double t1, int count,
                                      const TransportOptions& options) {
  if (wf.particles() < 2) throw Error(ErrorKind::InvalidArgument, "non-conservation probe needs N >= 2");
  return transport_test(wf, t0, t1, count, TransportModel::Retarded, options);
}

FamilyMember canonical_entangled(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  const double mass = 1.0;
  const auto packet = [&](double centre, double k) {
    GaussianPacketSpec spec;
    spec.center = Vector3(centre, 0.0, 0.0);
    spec.momentum = Vector3(k * eps, 0.0, 0.0);
    spec.sigma_k = Vector3(0.5 * eps, 0.0, 0.0);
    return gaussian_packet(mass, spec);
  };
  std::vector<Term> terms;
  terms.push_back(Term{1.0, {packet(-1.0, 1.0), packet(1.0, -1.0)}});
  terms.push_back(Term{Complex(0.0, 0.6), {packet(-1.0, -0.5), packet(1.0, 1.0)}});

  FamilyMember member{WaveFunction(std::move(terms)), {Vector3(-1.0, 0.0, 0.0), Vector3(1.0, 0.0, 0.0)}, {}};
  member.config.dt = 1e-2;
  member.config.t_start = 0.0;
  member.config.t_end = -10.0;
  return member;
}

SweepTable limit_sweep(const ScenarioFamily& family, std::span<const double> eps_values, int jobs) {
  if (eps_values.empty()) throw Error(ErrorKind::InvalidArgument, "empty eps list");
  SweepTable table;
  table.rows.resize(eps_values.size());
  parallel_for(static_cast<int>(eps_values.size()), jobs, [&](int k) {
    const double eps = eps_values[k];
    const FamilyMember member = family(eps);
    const IntegratorConfig& config = member.config;
    BoundaryData boundary{config.t_start, member.positions, bd_velocities(config.t_start, member.positions, member.wf, config)};
    const RunResult retarded = run(member.wf, boundary, config);
    if (retarded.failure) throw Error(retarded.failure->kind, retarded.failure->message);
    const RunResult reference = bd_run(member.wf, config.t_start, member.positions, config);
    if (reference.failure) throw Error(reference.failure->kind, reference.failure->message);

    double lowest = config.t_end;
    for (const auto& traj : retarded.trajectories) lowest = std::max(lowest, traj.earliest());
    for (const auto& traj : reference.trajectories) lowest = std::max(lowest, traj.earliest());
    const auto grid = uniform_grid(lowest, config.t_start, 201);
    const auto metrics = compare(retarded.trajectories, reference.trajectories, grid);
    table.rows[k] = SweepRow{eps, metrics.max_dist, metrics.mean_dist};
  });

  table.strictly_decreasing = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    // Rows are listed in the order given; "decreasing" follows decreasing eps.
    const auto& a = table.rows[k - 1];
    const auto& b = table.rows[k];
    const bool ordered = (b.eps < a.eps) ? b.max_deviation < a.max_deviation : b.max_deviation > a.max_deviation;
    table.strictly_decreasing = table.strictly_decreasing && ordered && b.eps != a.eps;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (const auto& row : table.rows) {
    if (!(row.max_deviation > 0.0)) continue;
    const double x = std::log(row.eps), y = std::log(row.max_deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  const double denom = used * sxx - sx * sx;
  table.log_log_slope = used >= 2 && denom != 0.0 ? (used * sxy - sx * sy) / denom : 0.0;
  return table;
}

}  // namespace lcbd
