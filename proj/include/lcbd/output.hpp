#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "lcbd/dynamics.hpp"
#include "lcbd/ensemble.hpp"
#include "lcbd/scenario.hpp"

namespace lcbd {

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double x);

/// Header `particle,t,x,y,z,vx,vy,vz`; rows by descending t, then ascending particle.
void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories);

/// Run report: configuration echo, invariant extrema, termination cause and
/// wall time (the only field that varies between identical runs).
nlohmann::json run_report(const Scenario& scenario, const RunResult& result, double wall_time_s);

nlohmann::json to_json(const TransportReport& report);
nlohmann::json to_json(const SweepTable& table);

}  // namespace lcbd
