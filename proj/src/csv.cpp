#include "symode/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace symode {

std::string format_g17(double x) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (std::size_t i = 1; i <= traj.spec.n; ++i) {
    out += ",E" + std::to_string(i);
  }
  out += '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_g17(traj.times[k]);
    for (double x : traj.states[k]) {
      out += ',';
      out += format_g17(x);
    }
    out += '\n';
  }
  return out;
}

std::string diagnostics_csv(const DiagnosticsSeries& series) {
  std::string out = "t,V,L,Q,R,absR\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out += format_g17(series.times[k]);
    out += ',';
    out += format_g17(series.v[k]);
    out += ',';
    out += format_g17(series.l_rate[k]);
    out += ',';
    out += format_g17(series.q_rate[k]);
    out += ',';
    out += format_g17(series.r[k]);
    out += ',';
    out += format_g17(std::abs(series.r[k]));
    out += '\n';
  }
  return out;
}

std::string combined_csv(const Trajectory& traj, const DiagnosticsSeries& series) {
  if (traj.size() != series.times.size()) {
    throw std::invalid_argument("trajectory and diagnostics grids differ");
  }
  std::string out = "t";
  for (std::size_t i = 1; i <= traj.spec.n; ++i) {
    out += ",E" + std::to_string(i);
  }
  out += ",V,L,Q,R,absR\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_g17(traj.times[k]);
    for (double x : traj.states[k]) {
      out += ',';
      out += format_g17(x);
    }
    out += ',';
    out += format_g17(series.v[k]);
    out += ',';
    out += format_g17(series.l_rate[k]);
    out += ',';
    out += format_g17(series.q_rate[k]);
    out += ',';
    out += format_g17(series.r[k]);
    out += ',';
    out += format_g17(std::abs(series.r[k]));
    out += '\n';
  }
  return out;
}

std::string classification_json(const Classification& result) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(result.verdict);
  j["convergence_time"] = result.convergence_time
                              ? nlohmann::json(*result.convergence_time)
                              : nlohmann::json(nullptr);
  j["cycle_period"] = result.cycle_period ? nlohmann::json(*result.cycle_period)
                                          : nlohmann::json(nullptr);
  j["cycle_amplitude"] = result.cycle_amplitude
                             ? nlohmann::json(*result.cycle_amplitude)
                             : nlohmann::json(nullptr);
  j["final_r"] = result.final_r;
  j["onset_time"] = result.onset_time ? nlohmann::json(*result.onset_time)
                                      : nlohmann::json(nullptr);
  j["note"] = result.note;
  return j.dump(2) + "\n";
}

std::string equilibrium_json(const EquilibriumReport& report) {
  nlohmann::ordered_json j;
  j["b"] = report.b;
  j["method"] = to_string(report.method);
  j["residual"] = report.residual;
  j["b_min"] = report.b_min;
  j["b_max"] = report.b_max;
  j["sandwich_ok"] = report.sandwich_ok;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  return j.dump(2) + "\n";
}

}  // namespace symode
