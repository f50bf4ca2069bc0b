#include <doctest.h>

#include <string>

#include "lcbd/error.hpp"
#include "lcbd/scenario.hpp"

using namespace lcbd;
using nlohmann::json;

namespace {

json valid_doc() {
  return json::parse(R"({
    "version": 1, "mass": 1.0, "particles": 2,
    "wavefunction": {"terms": [{"coefficient": [1.0, 0.0], "factors": [
      {"modes": [{"momentum": [0.1, 0.0, 0.0], "spin": "up", "amplitude": [1.0, 0.0]}]},
      {"gaussian": {"center": [1.0, 0.0, 0.0], "momentum": [0.0, 0.0, 0.2], "sigma_k": [0.0, 0.0, 0.3],
                    "modes_per_axis": [1, 1, 5], "span": 3.0, "spin": "down"}}]}]},
    "boundary": {"t_start": 0.0, "particles": [
      {"position": [-1.0, 0.0, 0.0], "velocity": [0.0, 0.0, 0.0]},
      {"position": [1.0, 0.0, 0.0], "velocity": [0.1, 0.0, 0.0]}]},
    "integrator": {"dt": 0.01, "t_end": -1.0},
    "model": "retarded",
    "outputs": {"trajectories": "t.csv", "report": "r.json"},
    "rng_seed": 4,
    "ensemble": {"box": {"lower": [-3, 0, 0, -3, 0, 0], "upper": [3, 0, 0, 3, 0, 0]}, "bins": 10, "bootstrap": 5}
  })");
}

void expect_rejected(const json& doc, const std::string& where) {
  try {
    parse_scenario(doc);
    FAIL("accepted invalid scenario: " << where);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK_MESSAGE(std::string(e.what()).find(where) != std::string::npos, e.what());
  }
}

}  // namespace

TEST_CASE("a complete scenario parses") {
  const Scenario s = parse_scenario(valid_doc());
  CHECK(s.particles == 2);
  CHECK(s.model == Model::Retarded);
  CHECK(s.seed_rule == SeedRule::Explicit);
  CHECK(s.boundary.positions[1] == Vector3(1, 0, 0));
  CHECK(s.boundary.velocities[1] == Vector3(0.1, 0, 0));
  CHECK(s.integrator.dt == 0.01);
  CHECK(s.integrator.t_start == 0.0);
  CHECK(s.rng_seed == 4u);
  REQUIRE(s.ensemble);
  CHECK(s.ensemble->bins == 10);
  CHECK(s.ensemble->box.active_axes() == std::vector<int>{0, 3});
  CHECK(s.wavefunction().particles() == 2);
  CHECK(s.seed_velocities() == s.boundary.velocities);
}

TEST_CASE("every required field is required") {
  for (const char* key : {"version", "mass", "particles", "wavefunction", "boundary", "integrator", "model", "outputs",
                          "rng_seed"}) {
    json doc = valid_doc();
    doc.erase(key);
    expect_rejected(doc, key);
  }
  const std::vector<std::pair<json::json_pointer, std::string>> nested{
      {json::json_pointer("/boundary/t_start"), "t_start"},
      {json::json_pointer("/boundary/particles/0/position"), "position"},
      {json::json_pointer("/boundary/particles/1/velocity"), "velocity"},
      {json::json_pointer("/integrator/dt"), "dt"},
      {json::json_pointer("/integrator/t_end"), "t_end"},
      {json::json_pointer("/outputs/report"), "report"},
      {json::json_pointer("/wavefunction/terms/0/coefficient"), "coefficient"},
      {json::json_pointer("/wavefunction/terms/0/factors/0/modes/0/spin"), "spin"},
  };
  for (const auto& [ptr, name] : nested) {
    json doc = valid_doc();
    doc[ptr.parent_pointer()].erase(ptr.back());
    expect_rejected(doc, name);
  }
}

TEST_CASE("ill-typed and out-of-range values are rejected") {
  const std::vector<std::tuple<std::string, json, std::string>> cases{
      {"/version", 2, "version"},
      {"/version", "1", "version"},
      {"/mass", -1.0, "mass"},
      {"/mass", "heavy", "mass"},
      {"/particles", 0, "particles"},
      {"/particles", 1.5, "particles"},
      {"/particles", 3, "factors"},
      {"/boundary/particles/1/velocity", json::array({1.0, 0.0, 0.0}), "velocity"},
      {"/boundary/particles/1/velocity", json::array({0.6, 0.6, 0.6}), "velocity"},
      {"/boundary/particles/0/position", json::array({0.0, 0.0}), "position"},
      {"/boundary/seed_rule", "guess", "seed_rule"},
      {"/integrator/dt", 0.0, "integrator"},
      {"/integrator/dt", -0.1, "integrator"},
      {"/integrator/t_end", 0.0, "integrator"},
      {"/integrator/t_end", 2.0, "integrator"},
      {"/model", "newtonian", "model"},
      {"/outputs/report", "", "outputs"},
      {"/rng_seed", -3, "rng_seed"},
      {"/rng_seed", 1.5, "rng_seed"},
      {"/wavefunction/terms", json::array(), "terms"},
      {"/wavefunction/terms/0/coefficient", json::array({1.0}), "coefficient"},
      {"/wavefunction/terms/0/factors/0/modes/0/spin", "sideways", "spin"},
      {"/ensemble/bins", 0, "bins"},
      {"/ensemble/bootstrap", 1, "bootstrap"},
      {"/ensemble/box/lower", json::array({0, 0, 0}), "box"},
  };
  for (const auto& [ptr, value, where] : cases) {
    json doc = valid_doc();
    doc[json::json_pointer(ptr)] = value;
    CAPTURE(ptr);
    expect_rejected(doc, where);
  }
}

TEST_CASE("unknown keys are rejected at every level") {
  for (const char* ptr : {"/colour", "/boundary/colour", "/integrator/colour", "/outputs/colour",
                          "/wavefunction/terms/0/colour", "/boundary/particles/0/colour", "/ensemble/colour"}) {
    json doc = valid_doc();
    doc[json::json_pointer(ptr)] = 1;
    CAPTURE(ptr);
    expect_rejected(doc, "colour");
  }
  // the Bohm-Dirac seed rule derives the velocities; explicit ones are then an error
  json doc = valid_doc();
  doc["boundary"]["seed_rule"] = "bohm-dirac";
  expect_rejected(doc, "velocity");
  for (auto& p : doc["boundary"]["particles"]) p.erase("velocity");
  const Scenario s = parse_scenario(doc);
  CHECK(s.seed_rule == SeedRule::BohmDirac);
  CHECK(s.seed_velocities().size() == 2);
}

TEST_CASE("families rescale momenta and keep everything else") {
  json family{{"version", 1}, {"base", valid_doc()}};
  const ScenarioFamily f = family_from_json(family);
  const FamilyMember one = f(1.0), half = f(0.5);
  CHECK(one.positions == half.positions);
  CHECK(one.config.dt == half.config.dt);
  const std::vector<Vector3> x{Vector3(0.3, 0.1, 0), Vector3(0.9, 0, 0.2)};
  CHECK(density(one.wf, 0.0, x) != density(half.wf, 0.0, x));
  CHECK_THROWS_AS(f(0.0), Error);
  family["extra"] = true;
  CHECK_THROWS_AS(family_from_json(family), Error);
}

TEST_CASE("unreadable and malformed files") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
}
