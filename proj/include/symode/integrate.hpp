#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "symode/system.hpp"

namespace symode {

/// Fixed-step RK4 settings. record_stride thins the stored samples; the
/// integrator always records the initial state and the final landing point.
struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 0.0;
  std::size_t record_stride = 10;
};

/// One scheduled external input: a constant additive term on element
/// `element`'s derivative, active while t_start <= t < t_stop. An absent
/// t_stop means the input stays on for the rest of the run. Negative
/// amplitudes model withdrawal.
struct InputEntry {
  std::size_t element = 0;  // 0-based
  double t_start = 0.0;
  std::optional<double> t_stop;
  double amplitude = 0.0;

  bool active_at(double t) const {
    return t >= t_start && (!t_stop || t < *t_stop);
  }
  bool operator==(const InputEntry&) const = default;
};

using InputSchedule = std::vector<InputEntry>;

/// Recorded solution samples plus everything needed to interpret them.
/// blowup_time is set when any magnitude exceeded the guard threshold; the
/// trajectory then ends at the last finite recorded sample.
/// first_nonpositive_time flags the first recorded sample with a
/// non-positive element (the positive orthant is invariant for the exact
/// flow, so this indicates unphysical parameters or inputs).
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  SystemSpec spec;
  InputSchedule schedule;
  std::optional<double> blowup_time;
  std::optional<double> first_nonpositive_time;

  std::size_t size() const { return times.size(); }
  bool diverged() const { return blowup_time.has_value(); }
};

/// Field of the forced system: vector_field plus the active scheduled inputs
/// at time t.
State augmented_field(const SystemSpec& spec, const State& state,
                      const InputSchedule& schedule, double t);

/// One classical RK4 step of the forced system. Throws std::runtime_error
/// carrying the failure time if the result is non-finite.
State step_rk4(const SystemSpec& spec, const State& state,
               const InputSchedule& schedule, double t, double dt);

/// Integrates from `initial` over [0, t_end] with fixed steps of config.dt
/// plus one partial step to land exactly on t_end. Guard: when any |E_i|
/// exceeds 1e12 or goes non-finite, integration stops and blowup_time is set
/// in-band instead of throwing. Sample times are computed as k * dt, never
/// accumulated.
Trajectory simulate(const SystemSpec& spec, const State& initial,
                    const IntegratorConfig& config,
                    const InputSchedule& schedule = {});

}  // namespace symode
