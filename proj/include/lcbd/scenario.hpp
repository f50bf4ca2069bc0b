#pragma once

// Scenario files: strict JSON descriptions of a run.
//
//   {
//     "version": 1,
//     "mass": 1.0,
//     "particles": 2,
//     "wavefunction": {"terms": [{"coefficient": [re, im], "factors": [FACTOR, ...]}, ...]},
//     "boundary": {"t_start": 0.0, "seed_rule": "explicit" | "bohm-dirac",
//                  "particles": [{"position": [x, y, z], "velocity": [vx, vy, vz]}, ...]},
//     "integrator": {"dt": 0.01, "t_end": -5.0,
//                    "lightlike_tol": 1e-6, "delay_min": 1e-9, "psi_zero_tol": 1e-12},
//     "model": "retarded" | "bohm-dirac",
//     "outputs": {"trajectories": "trajectories.csv", "report": "report.json"},
//     "rng_seed": 1,
//     "ensemble": {"box": {"lower": [...3N], "upper": [...3N]}, "box_t1": {...},
//                  "bins": 20, "bootstrap": 30}                       (optional)
//   }
//
// FACTOR is either {"modes": [{"momentum": [px, py, pz], "spin": "up" | "down",
// "amplitude": [re, im]}, ...]} or {"gaussian": {"center": [...], "momentum": [...],
// "sigma_k": [...], "modes_per_axis": [kx, ky, kz], "span": 3.0, "spin": "up"}}
// (span, modes_per_axis and spin optional). Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lcbd/dynamics.hpp"
#include "lcbd/ensemble.hpp"

namespace lcbd {

enum class Model { Retarded, BohmDirac };
enum class SeedRule { Explicit, BohmDirac };

std::string to_string(Model model);

struct EnsembleSettings {
  SamplingBox box;
  std::optional<SamplingBox> box_t1;
  int bins = 20;
  int bootstrap = 30;
};

struct Scenario {
  int version = 1;
  double mass = 1.0;
  int particles = 1;
  nlohmann::json wavefunction_json;
  std::optional<WaveFunction> wf;
  SeedRule seed_rule = SeedRule::Explicit;
  BoundaryData boundary;
  IntegratorConfig integrator;
  Model model = Model::Retarded;
  std::string trajectories_path;
  std::string report_path;
  std::uint64_t rng_seed = 0;
  std::optional<EnsembleSettings> ensemble;
  nlohmann::json source;

  const WaveFunction& wavefunction() const { return *wf; }

  /// Boundary velocities after applying the seed rule.
  std::vector<Vector3> seed_velocities() const;
};

/// Throws Error(Validation) naming the offending field.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Builds the wave function, multiplying every momentum (and Gaussian momentum
/// spread) by momentum_scale.
WaveFunction build_wavefunction(const nlohmann::json& wavefunction, double mass, int particles,
                                double momentum_scale = 1.0);

/// Family file: {"version": 1, "base": SCENARIO}. Member eps rescales all
/// momenta of the base wave function by eps; boundary positions and
/// integrator settings are shared.
ScenarioFamily load_family(const std::filesystem::path& path);
ScenarioFamily family_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace lcbd
