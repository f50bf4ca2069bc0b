#pragma once

// |psi|^2 sampling on an equal-time slice, ensemble transport under either
// guidance law, and binned distribution metrics.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lcbd/dynamics.hpp"
#include "lcbd/reference_bd.hpp"

namespace lcbd {

/// Axis-aligned region of configuration space (3N coordinates, particle-major).
/// Coordinates with lower == upper are held fixed at that value.
struct SamplingBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dimension() const { return static_cast<int>(lower.size()); }
  std::vector<int> active_axes() const;
  void validate(int particles) const;
  SamplingBox scaled(double factor) const;
};

/// Configuration (3N coordinates) split into per-particle positions.
std::vector<Vector3> unpack_configuration(const Eigen::VectorXd& q);

struct SamplerOptions {
  double envelope_factor = 1.1;
  /// Budget of density evaluations for the envelope scan and the mass check.
  long scan_budget = 200000;
  /// Required fraction of the density mass inside the box.
  double min_mass_fraction = 1.0 - 1e-3;
  double low_acceptance = 1e-3;
};

struct SampleSet {
  double t = 0.0;
  std::vector<Eigen::VectorXd> configurations;
  std::uint64_t rng_seed = 0;
  double envelope = 0.0;
  double acceptance = 0.0;
  bool low_acceptance = false;
};

/// Fraction of the density mass in `box` relative to the box scaled 1.5x about its centre.
double box_mass_fraction(const WaveFunction& wf, double t, const SamplingBox& box, long budget = 200000);

/// Rejection sampling from rho(t, .) inside `box`.
/// Throws EnvelopeExceeded if a proposal exceeds the envelope, InvalidArgument
/// if the box misses more than 1 - min_mass_fraction of the mass or count < 1.
SampleSet sample(const WaveFunction& wf, double t, int count, const SamplingBox& box, std::uint64_t rng_seed,
                 const SamplerOptions& options = {});

/// Reference bin probabilities and empirical histograms on the active axes of a box.
/// Up to two active axes are binned jointly; with more, each active axis is
/// binned on its own and the L1 distances are summed over axes.
class BinnedDensity {
 public:
  BinnedDensity(const SamplingBox& box, int bins);

  int bins() const { return bins_; }
  /// Reference probabilities of rho(t) on the grid, normalized to the box mass.
  std::vector<std::vector<double>> reference(const WaveFunction& wf, double t, long budget = 400000) const;
  /// Empirical probabilities; mass outside the box goes to a trailing overflow bin.
  std::vector<std::vector<double>> empirical(std::span<const Eigen::VectorXd> configurations) const;

  static double l1_distance(const std::vector<std::vector<double>>& p, const std::vector<std::vector<double>>& q);

 private:
  std::vector<std::size_t> bin_of(const Eigen::VectorXd& q) const;

  SamplingBox box_;
  std::vector<int> axes_;
  int bins_;
  bool joint_;
};

enum class TransportModel {
  BohmDirac,
  Retarded,
  /// Particles stay put; the negative control of the equivariance test.
  Frozen,
};

std::string to_string(TransportModel model);

struct TransportOptions {
  int bins = 20;
  int bootstrap = 30;
  int jobs = 1;
  std::uint64_t rng_seed = 1;
  double dt = 1e-2;
  SamplingBox box0;
  /// Histogram region at t1; box0 is used when empty.
  SamplingBox box1;
  IntegratorConfig tolerances;
  SamplerOptions sampler;
};

struct TransportPoint {
  double t = 0.0;
  double distance = 0.0;
  double noise_mean = 0.0;
  double noise_std = 0.0;

  double threshold() const { return noise_mean + 3.0 * noise_std; }
  bool within_noise() const { return distance <= threshold(); }
};

struct TransportReport {
  TransportModel model = TransportModel::BohmDirac;
  int particles = 1;
  int count = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double acceptance = 0.0;
  std::vector<TransportPoint> series;

  const TransportPoint& final_point() const { return series.back(); }
};

/// Sample at t0, transport every member to t1 under `model`, and compare the
/// binned result with rho(t1) against the noise floor of direct sampling.
/// Retarded members receive Bohm-Dirac boundary velocities at t0 and must run
/// towards smaller t.
TransportReport transport_test(const WaveFunction& wf, double t0, double t1, int count, TransportModel model,
                               const TransportOptions& options);

/// N = 1, Bohm-Dirac transport.
TransportReport equivariance_test(const WaveFunction& wf, double t0, double t1, int count,
                                  const TransportOptions& options);

/// N >= 2, retarded transport backwards from the boundary slice t0.
TransportReport nonconservation_probe(const WaveFunction& wf, double t0, double t1, int count,
                                      const TransportOptions& options);

/// One member of an epsilon-parametrized scenario family.
struct FamilyMember {
  WaveFunction wf;
  std::vector<Vector3> positions;
  IntegratorConfig config;
};

using ScenarioFamily = std::function<FamilyMember(double eps)>;

/// Two particles at x = -+1 in a superposition of counter-moving Gaussian
/// packet pairs, with mean momenta and momentum spreads proportional to eps.
FamilyMember canonical_entangled(double eps);

struct SweepRow {
  double eps = 0.0;
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(max_deviation) against log(eps).
  double log_log_slope = 0.0;
  bool strictly_decreasing = false;
};

/// Run both laws backwards from the same boundary positions (retarded seed
/// velocities from the Bohm-Dirac law) for each eps and tabulate the maximal
/// trajectory distance.
SweepTable limit_sweep(const ScenarioFamily& family, std::span<const double> eps_values, int jobs = 1);

/// Deterministic parallel map over [0, count).
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace lcbd
