#pragma once

#include <filesystem>
#include <string>

#include "symode/diagnostics.hpp"
#include "symode/equilibria.hpp"
#include "symode/integrate.hpp"

namespace symode {

/// Shortest decimal form of x (15 to 17 significant digits) that parses back
/// bit-identically through strtod.
std::string format_g17(double x);

/// Writes content to path atomically: a sibling temp file is renamed over the
/// final path, so interrupted runs never leave partial files there.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

/// Header `t,E1,...,En`, one row per recorded sample, full double precision.
std::string trajectory_csv(const Trajectory& traj);

/// Header `t,V,L,Q,R,absR`.
std::string diagnostics_csv(const DiagnosticsSeries& series);

/// Trajectory columns with the diagnostics columns appended:
/// `t,E1,...,En,V,L,Q,R,absR`. Sample grids must match.
std::string combined_csv(const Trajectory& traj, const DiagnosticsSeries& series);

/// Classification as a JSON object: verdict, convergence_time, cycle_period,
/// cycle_amplitude, final_r, onset_time, note. Absent optionals are null.
std::string classification_json(const Classification& result);

/// EquilibriumReport as a JSON object: b, method, residual, b_min, b_max,
/// sandwich_ok, converged, iterations.
std::string equilibrium_json(const EquilibriumReport& report);

}  // namespace symode
