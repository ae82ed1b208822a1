#include "symode/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace symode {

namespace {

constexpr double kBlowupGuard = 1e12;

void forced_field_into(const SystemSpec& spec, const State& state, double t,
                       const InputSchedule& schedule, State& out) {
  vector_field_into(spec, state, out);
  for (const auto& input : schedule) {
    if (input.active_at(t)) out[input.element] += input.amplitude;
  }
}

bool all_finite(const State& state) {
  for (double x : state) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool within_guard(const State& state) {
  for (double x : state) {
    if (!std::isfinite(x) || std::abs(x) > kBlowupGuard) return false;
  }
  return true;
}

// Scratch buffers for one RK4 step; avoids per-step allocation in simulate().
struct Rk4Work {
  State k1, k2, k3, k4, tmp;
  explicit Rk4Work(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_into(const SystemSpec& spec, const State& state, double t, double dt,
              const InputSchedule& schedule, Rk4Work& w, State& out) {
  const std::size_t n = spec.n;
  forced_field_into(spec, state, t, schedule, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = state[i] + 0.5 * dt * w.k1[i];
  forced_field_into(spec, w.tmp, t + 0.5 * dt, schedule, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = state[i] + 0.5 * dt * w.k2[i];
  forced_field_into(spec, w.tmp, t + 0.5 * dt, schedule, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = state[i] + dt * w.k3[i];
  forced_field_into(spec, w.tmp, t + dt, schedule, w.k4);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = state[i] +
             dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
  }
}

bool any_nonpositive(const State& state) {
  for (double x : state) {
    if (!(x > 0.0)) return true;
  }
  return false;
}

}  // namespace

State augmented_field(const SystemSpec& spec, const State& state,
                      const InputSchedule& schedule, double t) {
  State out(spec.n);
  forced_field_into(spec, state, t, schedule, out);
  return out;
}

State step_rk4(const SystemSpec& spec, const State& state,
               const InputSchedule& schedule, double t, double dt) {
  Rk4Work work(spec.n);
  State out(spec.n);
  rk4_into(spec, state, t, dt, schedule, work, out);
  if (!all_finite(out)) {
    throw std::runtime_error("rk4 step produced a non-finite state at t = " +
                             std::to_string(t));
  }
  return out;
}

Trajectory simulate(const SystemSpec& spec, const State& initial,
                    const IntegratorConfig& config,
                    const InputSchedule& schedule) {
  if (initial.size() != spec.n) {
    throw std::invalid_argument("initial state size does not match system");
  }
  if (!(config.dt > 0.0) || !(config.t_end > 0.0) ||
      !(config.dt <= config.t_end)) {
    throw std::invalid_argument("integrator needs 0 < dt <= t_end");
  }
  for (const auto& input : schedule) {
    if (input.element >= spec.n) {
      throw std::invalid_argument("input schedule targets element " +
                                  std::to_string(input.element + 1) +
                                  " outside the system");
    }
    if (input.t_stop && !(*input.t_stop > input.t_start)) {
      throw std::invalid_argument("input t_stop must exceed t_start");
    }
  }

  const double dt = config.dt;
  const std::size_t stride = config.record_stride == 0 ? 1 : config.record_stride;
  // Steps that fit entirely inside [0, t_end]; the remainder is one partial
  // step. The epsilon absorbs representation error in t_end / dt.
  const auto whole_steps =
      static_cast<std::size_t>(std::floor(config.t_end / dt + 1e-9));
  const double whole_span = static_cast<double>(whole_steps) * dt;
  const double tail = config.t_end - whole_span;
  const bool has_tail = tail > 1e-12 * std::max(1.0, config.t_end);

  Trajectory traj;
  traj.spec = spec;
  traj.schedule = schedule;
  traj.times.reserve(whole_steps / stride + 2);
  traj.states.reserve(whole_steps / stride + 2);

  State current = initial;
  Rk4Work work(spec.n);
  State next(spec.n);

  auto record = [&](double t, const State& s) {
    if (!traj.first_nonpositive_time && any_nonpositive(s)) {
      traj.first_nonpositive_time = t;
    }
    traj.times.push_back(t);
    traj.states.push_back(s);
  };

  record(0.0, current);
  for (std::size_t step = 0; step < whole_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    rk4_into(spec, current, t, dt, schedule, work, next);
    if (!within_guard(next)) {
      traj.blowup_time = t + dt;
      return traj;
    }
    current = next;
    const std::size_t done = step + 1;
    if (done % stride == 0 && !(done == whole_steps && !has_tail)) {
      record(static_cast<double>(done) * dt, current);
    }
  }
  if (has_tail) {
    rk4_into(spec, current, whole_span, tail, schedule, work, next);
    if (!within_guard(next)) {
      traj.blowup_time = config.t_end;
      return traj;
    }
    current = next;
  }
  if (config.t_end > 0.0) record(config.t_end, current);
  return traj;
}

}  // namespace symode
