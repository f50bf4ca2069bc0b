#include "lcbd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "lcbd/reference_bd.hpp"

namespace lcbd {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Validation, path + ": " + what);
}

// Strict object reader: every key must be consumed or declared optional.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : j_.items())
      if (!known.count(key)) invalid(path_ + "." + key, "unknown field");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) const {
    if (!j_.contains(key)) invalid(path_ + "." + key, "missing required field");
    return j_.at(key);
  }

  std::string child(const char* key) const { return path_ + "." + key; }

  double number(const char* key) const { return as_number(at(key), child(key)); }

  double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const char* key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) invalid(child(key), "expected an integer");
    return v.get<long>();
  }

  std::string string(const char* key) const {
    const json& v = at(key);
    if (!v.is_string()) invalid(child(key), "expected a string");
    return v.get<std::string>();
  }

  const json& array(const char* key) const {
    const json& v = at(key);
    if (!v.is_array()) invalid(child(key), "expected an array");
    return v;
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) invalid(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(path, "must be finite");
    return x;
  }

 private:
  const json& j_;
  std::string path_;
};

Eigen::VectorXd number_array(const json& v, const std::string& path, std::size_t expected) {
  if (!v.is_array()) invalid(path, "expected an array");
  if (expected != 0 && v.size() != expected) invalid(path, "expected " + std::to_string(expected) + " numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out(k) = ObjectReader::as_number(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

Vector3 vector3(const json& v, const std::string& path) { return number_array(v, path, 3); }

Complex complex_number(const json& v, const std::string& path) {
  const Eigen::VectorXd pair = number_array(v, path, 2);
  return {pair(0), pair(1)};
}

Spin spin_value(const json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "expected \"up\" or \"down\"");
  const auto s = v.get<std::string>();
  if (s == "up") return Spin::Up;
  if (s == "down") return Spin::Down;
  invalid(path, "expected \"up\" or \"down\"");
}

Packet build_factor(const json& j, const std::string& path, double mass, double scale) {
  ObjectReader factor(j, path);
  if (factor.has("modes") == factor.has("gaussian")) invalid(path, "exactly one of \"modes\" or \"gaussian\" required");

  if (factor.has("modes")) {
    factor.allow_only({"modes"});
    const json& list = factor.array("modes");
    if (list.empty()) invalid(factor.child("modes"), "at least one mode required");
    std::vector<PlaneWaveMode> modes;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string mpath = factor.child("modes") + "[" + std::to_string(k) + "]";
      ObjectReader m(list[k], mpath);
      m.allow_only({"momentum", "spin", "amplitude"});
      PlaneWaveMode mode;
      mode.momentum = scale * vector3(m.at("momentum"), m.child("momentum"));
      mode.spin = spin_value(m.at("spin"), m.child("spin"));
      mode.amplitude = complex_number(m.at("amplitude"), m.child("amplitude"));
      modes.push_back(mode);
    }
    return Packet(mass, std::move(modes));
  }

  factor.allow_only({"gaussian"});
  ObjectReader g(factor.at("gaussian"), factor.child("gaussian"));
  g.allow_only({"center", "momentum", "sigma_k", "modes_per_axis", "span", "spin"});
  GaussianPacketSpec spec;
  spec.center = vector3(g.at("center"), g.child("center"));
  spec.momentum = scale * vector3(g.at("momentum"), g.child("momentum"));
  spec.sigma_k = scale * vector3(g.at("sigma_k"), g.child("sigma_k"));
  if ((spec.sigma_k.array() < 0.0).any()) invalid(g.child("sigma_k"), "must be non-negative");
  if (g.has("modes_per_axis")) {
    const json& counts = g.array("modes_per_axis");
    if (counts.size() != 3) invalid(g.child("modes_per_axis"), "expected 3 integers");
    for (int a = 0; a < 3; ++a) {
      if (!counts[a].is_number_integer() || counts[a].get<long>() < 1 || counts[a].get<long>() > 64)
        invalid(g.child("modes_per_axis"), "entries must be integers in 1..64");
      spec.modes_per_axis(a) = counts[a].get<int>();
    }
  }
  spec.span = g.number_or("span", spec.span);
  if (!(spec.span > 0.0)) invalid(g.child("span"), "must be positive");
  if (g.has("spin")) spec.spin = spin_value(g.at("spin"), g.child("spin"));
  return gaussian_packet(mass, spec);
}

SamplingBox parse_box(const json& j, const std::string& path, int particles) {
  ObjectReader box(j, path);
  box.allow_only({"lower", "upper"});
  SamplingBox out{number_array(box.at("lower"), box.child("lower"), 3 * particles),
                  number_array(box.at("upper"), box.child("upper"), 3 * particles)};
  if ((out.upper.array() < out.lower.array()).any()) invalid(path, "upper must not lie below lower");
  if (out.active_axes().empty()) invalid(path, "box has no extent");
  return out;
}

}  // namespace

std::string to_string(Model model) { return model == Model::Retarded ? "retarded" : "bohm-dirac"; }

WaveFunction build_wavefunction(const json& wavefunction, double mass, int particles, double momentum_scale) {
  ObjectReader wf(wavefunction, "wavefunction");
  wf.allow_only({"terms"});
  const json& terms_json = wf.array("terms");
  if (terms_json.empty()) invalid("wavefunction.terms", "at least one term required");

  std::vector<Term> terms;
  for (std::size_t t = 0; t < terms_json.size(); ++t) {
    const std::string tpath = "wavefunction.terms[" + std::to_string(t) + "]";
    ObjectReader term(terms_json[t], tpath);
    term.allow_only({"coefficient", "factors"});
    Term out;
    out.coefficient = complex_number(term.at("coefficient"), term.child("coefficient"));
    const json& factors = term.array("factors");
    if (static_cast<int>(factors.size()) != particles)
      invalid(term.child("factors"), "expected " + std::to_string(particles) + " factors");
    for (std::size_t k = 0; k < factors.size(); ++k)
      out.factors.push_back(build_factor(factors[k], term.child("factors") + "[" + std::to_string(k) + "]", mass,
                                         momentum_scale));
    terms.push_back(std::move(out));
  }
  try {
    return WaveFunction(std::move(terms));
  } catch (const Error& e) {
    invalid("wavefunction", e.what());
  }
}

Scenario parse_scenario(const json& doc) {
  ObjectReader root(doc, "$");
  root.allow_only({"version", "mass", "particles", "wavefunction", "boundary", "integrator", "model", "outputs",
                   "rng_seed", "ensemble"});
  Scenario s;
  s.source = doc;

  s.version = static_cast<int>(root.integer("version"));
  if (s.version != 1) invalid("$.version", "only version 1 is supported");
  s.mass = root.number("mass");
  if (!(s.mass > 0.0)) invalid("$.mass", "must be positive");
  const long particles = root.integer("particles");
  if (particles < 1 || particles > 6) invalid("$.particles", "must be in 1..6");
  s.particles = static_cast<int>(particles);

  s.wavefunction_json = root.at("wavefunction");
  s.wf.emplace(build_wavefunction(s.wavefunction_json, s.mass, s.particles));

  ObjectReader boundary(root.at("boundary"), "$.boundary");
  boundary.allow_only({"t_start", "seed_rule", "particles"});
  s.boundary.t_start = boundary.number("t_start");
  if (boundary.has("seed_rule")) {
    const auto rule = boundary.string("seed_rule");
    if (rule == "explicit")
      s.seed_rule = SeedRule::Explicit;
    else if (rule == "bohm-dirac")
      s.seed_rule = SeedRule::BohmDirac;
    else
      invalid(boundary.child("seed_rule"), "expected \"explicit\" or \"bohm-dirac\"");
  }
  const json& bparticles = boundary.array("particles");
  if (static_cast<int>(bparticles.size()) != s.particles)
    invalid(boundary.child("particles"), "expected " + std::to_string(s.particles) + " entries");
  for (std::size_t k = 0; k < bparticles.size(); ++k) {
    const std::string ppath = boundary.child("particles") + "[" + std::to_string(k) + "]";
    ObjectReader p(bparticles[k], ppath);
    if (s.seed_rule == SeedRule::Explicit)
      p.allow_only({"position", "velocity"});
    else
      p.allow_only({"position"});
    s.boundary.positions.push_back(vector3(p.at("position"), p.child("position")));
    if (s.seed_rule == SeedRule::Explicit) {
      const Vector3 v = vector3(p.at("velocity"), p.child("velocity"));
      if (!(v.norm() < 1.0)) invalid(p.child("velocity"), "seed velocity must satisfy |v| < 1");
      s.boundary.velocities.push_back(v);
    }
  }

  ObjectReader integrator(root.at("integrator"), "$.integrator");
  integrator.allow_only({"dt", "t_end", "lightlike_tol", "delay_min", "psi_zero_tol"});
  s.integrator.t_start = s.boundary.t_start;
  s.integrator.dt = integrator.number("dt");
  s.integrator.t_end = integrator.number("t_end");
  s.integrator.lightlike_tol = integrator.number_or("lightlike_tol", s.integrator.lightlike_tol);
  s.integrator.delay_min = integrator.number_or("delay_min", s.integrator.delay_min);
  s.integrator.psi_zero_tol = integrator.number_or("psi_zero_tol", s.integrator.psi_zero_tol);
  try {
    s.integrator.validate();
  } catch (const Error& e) {
    invalid("$.integrator", e.what());
  }

  const auto model = root.string("model");
  if (model == "retarded")
    s.model = Model::Retarded;
  else if (model == "bohm-dirac")
    s.model = Model::BohmDirac;
  else
    invalid("$.model", "expected \"retarded\" or \"bohm-dirac\"");

  ObjectReader outputs(root.at("outputs"), "$.outputs");
  outputs.allow_only({"trajectories", "report"});
  s.trajectories_path = outputs.string("trajectories");
  s.report_path = outputs.string("report");
  if (s.trajectories_path.empty() || s.report_path.empty()) invalid("$.outputs", "paths must be non-empty");

  const json& seed = root.at("rng_seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long>() < 0))
    invalid("$.rng_seed", "expected a non-negative integer");
  s.rng_seed = seed.get<std::uint64_t>();

  if (root.has("ensemble")) {
    ObjectReader ens(root.at("ensemble"), "$.ensemble");
    ens.allow_only({"box", "box_t1", "bins", "bootstrap"});
    EnsembleSettings settings;
    settings.box = parse_box(ens.at("box"), ens.child("box"), s.particles);
    if (ens.has("box_t1")) settings.box_t1 = parse_box(ens.at("box_t1"), ens.child("box_t1"), s.particles);
    if (ens.has("bins")) {
      const long bins = ens.integer("bins");
      if (bins < 1 || bins > 1000) invalid(ens.child("bins"), "must be in 1..1000");
      settings.bins = static_cast<int>(bins);
    }
    if (ens.has("bootstrap")) {
      const long b = ens.integer("bootstrap");
      if (b < 2 || b > 10000) invalid(ens.child("bootstrap"), "must be in 2..10000");
      settings.bootstrap = static_cast<int>(b);
    }
    s.ensemble = settings;
  }
  return s;
}

std::vector<Vector3> Scenario::seed_velocities() const {
  if (seed_rule == SeedRule::Explicit) return boundary.velocities;
  return bd_velocities(boundary.t_start, boundary.positions, wavefunction(), integrator);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Validation, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Validation, path.string() + ": malformed JSON: " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_json_file(path)); }

ScenarioFamily family_from_json(const json& doc) {
  ObjectReader root(doc, "$");
  root.allow_only({"version", "base"});
  if (root.integer("version") != 1) invalid("$.version", "only version 1 is supported");
  const Scenario base = parse_scenario(root.at("base"));
  return [base](double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::Validation, "eps must be positive and finite");
    FamilyMember member{build_wavefunction(base.wavefunction_json, base.mass, base.particles, eps),
                        base.boundary.positions, base.integrator};
    return member;
  };
}

ScenarioFamily load_family(const std::filesystem::path& path) { return family_from_json(read_json_file(path)); }

}  // namespace lcbd
