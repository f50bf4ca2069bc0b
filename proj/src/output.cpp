#include "lcbd/output.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>
#include <vector>

namespace lcbd {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories) {
  struct Row {
    double t;
    std::size_t particle;
    const Sample* sample;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    for (const auto& s : trajectories[i].samples()) rows.push_back({s.t, i, &s});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(b.t, a.particle) < std::tie(a.t, b.particle);
  });

  out << "particle,t,x,y,z,vx,vy,vz\n";
  for (const auto& row : rows) {
    const Sample& s = *row.sample;
    out << row.particle << ',' << format_double(s.t);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.position(k));
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.velocity(k));
    out << '\n';
  }
}

nlohmann::json run_report(const Scenario& scenario, const RunResult& result, double wall_time_s) {
  nlohmann::json report;
  report["model"] = to_string(scenario.model);
  report["config"] = scenario.source;

  nlohmann::json termination;
  if (result.failure) {
    termination["cause"] = std::string(to_string(result.failure->kind));
    termination["message"] = result.failure->message;
    termination["t"] = result.failure->t;
  } else {
    termination["cause"] = "completed";
  }
  report["termination"] = termination;

  const auto& log = result.log;
  report["invariants"] = {
      {"steps", log.steps},
      {"velocity_evaluations", log.evaluations},
      {"max_speed", log.max_speed},
      {"min_lightlike_margin", log.min_lightlike_margin},
      {"min_relative_psi", log.evaluations > 0 ? nlohmann::json(log.min_relative_psi) : nlohmann::json(nullptr)},
  };
  report["initial_constraint_violation"] = result.initial_violation;
  if (!result.trajectories.empty()) {
    report["t_reached"] = result.trajectories.front().frontier().t;
  }
  report["wall_time_s"] = wall_time_s;
  return report;
}

nlohmann::json to_json(const TransportReport& report) {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& p : report.series) {
    series.push_back({{"t", p.t},
                      {"l1_distance", p.distance},
                      {"noise_mean", p.noise_mean},
                      {"noise_std", p.noise_std},
                      {"threshold_3sigma", p.threshold()},
                      {"within_noise", p.within_noise()}});
  }
  return {{"model", to_string(report.model)}, {"particles", report.particles}, {"count", report.count},
          {"t0", report.t0},                  {"t1", report.t1},               {"acceptance", report.acceptance},
          {"series", series}};
}

nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows)
    rows.push_back({{"eps", row.eps}, {"max_deviation", row.max_deviation}, {"mean_deviation", row.mean_deviation}});
  return {{"rows", rows}, {"log_log_slope", table.log_log_slope}, {"strictly_decreasing", table.strictly_decreasing}};
}

}  // namespace lcbd
