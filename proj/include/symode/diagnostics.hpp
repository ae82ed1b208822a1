#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "symode/integrate.hpp"
#include "symode/system.hpp"

namespace symode {

/// Total magnitude V = sum_i E_i.
double lyapunov_sum(const State& state);

/// dV/dt split into its linear inflow and quadratic outflow:
///   dV/dt = L(E) - Q(E)
///   L(E)  = sum_i (k1[i - gen_offset] - k2[i]) * E_i
///   Q(E)  = sum_i k3[i] * E_i * E_{i + sup_offset}
struct LyapunovRate {
  double linear = 0.0;     // L(E)
  double quadratic = 0.0;  // Q(E)
  double total() const { return linear - quadratic; }
};

LyapunovRate lyapunov_rate(const SystemSpec& spec, const State& state);

/// Signed interaction energy of the deviation field d = E - b:
///   R(d) = sum_i k3[i] * d_i * d_{i + sup_offset}
/// Zero at equilibrium; sustained |R| marks traveling activity.
double onroad_energy(const SystemSpec& spec, const State& b, const State& state);

/// Per-sample diagnostics over a trajectory. The baseline b is piecewise
/// constant: it switches to the fixed point of the input-augmented system at
/// each input onset/offset boundary. dev_inf is the max-norm of E - b.
struct DiagnosticsSeries {
  struct Segment {
    double t_from = 0.0;
    State b;
  };
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> l_rate;
  std::vector<double> q_rate;
  std::vector<double> r;
  std::vector<double> dev_inf;
  std::vector<Segment> segments;

  const State& b_at(double t) const;
};

/// Computes the full series. b_base is the unforced equilibrium; when the
/// schedule changes the active forcing, the baseline is re-solved from the
/// previous segment's value (falling back to it if the solve fails).
DiagnosticsSeries diagnostics_series(const SystemSpec& spec,
                                     const Trajectory& traj,
                                     const State& b_base);

enum class Verdict { asymptotically_stable, oscillatory, divergent, indeterminate };

std::string to_string(Verdict verdict);

struct ClassifyOptions {
  double eps_conv = 1e-6;   // trailing mean |R| below this counts as settled
  double eps_state = 1e-3;  // trailing max-norm deviation bound for settling
  double eps_osc = 1e-3;    // trailing mean |R| above this counts as active
  double trailing_fraction = 0.2;
  double amplitude_tolerance = 0.05;  // cycle-to-cycle amplitude drift bound
};

struct Classification {
  Verdict verdict = Verdict::indeterminate;
  std::optional<double> convergence_time;
  std::optional<double> cycle_period;
  std::optional<std::vector<double>> cycle_amplitude;  // per element
  double final_r = 0.0;  // trailing mean |R|
  std::optional<double> onset_time;  // first |R| above eps_osc
  std::string note;
};

/// Trajectory verdict from the trailing-window statistics of R and the
/// deviation from the (piecewise) baseline:
///  - divergent on blowup;
///  - asymptotically stable when trailing mean |R| < eps_conv and trailing
///    max deviation < eps_state (convergence_time = first sample after the
///    last eps_state violation);
///  - oscillatory when trailing mean |R| > eps_osc and consecutive cycle
///    amplitudes of every active element agree within amplitude_tolerance
///    (element 1 must show at least 3 trailing peaks);
///  - indeterminate otherwise, with a note suggesting a longer run.
Classification classify(const DiagnosticsSeries& series, const Trajectory& traj,
                        const ClassifyOptions& options = {});

/// Convenience form that computes the series from b_base first.
Classification classify(const SystemSpec& spec, const Trajectory& traj,
                        const State& b_base, const ClassifyOptions& options = {});

struct OscillationMetrics {
  double period = 0.0;
  std::vector<double> amplitude;  // per element, trailing peak-to-peak
};

/// Period from the mean spacing of element 1's trailing-window peaks and
/// per-element trailing peak-to-peak amplitudes. Throws std::runtime_error
/// when fewer than 3 element-1 peaks are available.
OscillationMetrics oscillation_metrics(const Trajectory& traj,
                                       double trailing_fraction = 0.2);

/// Indices of strict interior maxima of `values` restricted to [from, to).
std::vector<std::size_t> peak_indices(const std::vector<double>& values,
                                      std::size_t from, std::size_t to);

}  // namespace symode
