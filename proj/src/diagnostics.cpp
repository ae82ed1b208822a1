#include "symode/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "symode/equilibria.hpp"

namespace symode {

double lyapunov_sum(const State& state) {
  double v = 0.0;
  for (double x : state) v += x;
  return v;
}

LyapunovRate lyapunov_rate(const SystemSpec& spec, const State& state) {
  LyapunovRate rate;
  const std::size_t n = spec.n;
  for (std::size_t i = 0; i < n; ++i) {
    // Reindexing the generative sum over the receiving element turns dV/dt
    // into a linear part with coefficient k1[i - gen_offset] - k2[i].
    const std::size_t src = wrap_index(static_cast<std::ptrdiff_t>(i) - spec.gen_offset, n);
    const std::size_t s = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.sup_offset, n);
    rate.linear += (spec.k1[src] - spec.k2[i]) * state[i];
    rate.quadratic += spec.k3[i] * state[i] * state[s];
  }
  return rate;
}

double onroad_energy(const SystemSpec& spec, const State& b, const State& state) {
  double r = 0.0;
  const std::size_t n = spec.n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.sup_offset, n);
    r += spec.k3[i] * (state[i] - b[i]) * (state[s] - b[s]);
  }
  return r;
}

const State& DiagnosticsSeries::b_at(double t) const {
  if (segments.empty()) {
    throw std::logic_error("diagnostics series has no baseline segments");
  }
  const State* found = &segments.front().b;
  for (const auto& segment : segments) {
    if (segment.t_from <= t) found = &segment.b;
  }
  return *found;
}

DiagnosticsSeries diagnostics_series(const SystemSpec& spec,
                                     const Trajectory& traj,
                                     const State& b_base) {
  DiagnosticsSeries series;
  series.segments.push_back({0.0, b_base});

  // Every onset or offset changes the forcing, so the baseline is re-solved
  // there; a failed solve keeps the previous segment's baseline.
  std::set<double> boundaries;
  for (const auto& input : traj.schedule) {
    if (input.t_start > 0.0) boundaries.insert(input.t_start);
    if (input.t_stop) boundaries.insert(*input.t_stop);
  }
  for (double tb : boundaries) {
    const State& previous = series.segments.back().b;
    auto report = solve_forced_fixed_point(spec, traj.schedule, tb, previous);
    series.segments.push_back({tb, report.converged ? report.b : previous});
  }

  const std::size_t count = traj.size();
  series.times = traj.times;
  series.v.resize(count);
  series.l_rate.resize(count);
  series.q_rate.resize(count);
  series.r.resize(count);
  series.dev_inf.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const State& state = traj.states[k];
    const State& b = series.b_at(traj.times[k]);
    series.v[k] = lyapunov_sum(state);
    const auto rate = lyapunov_rate(spec, state);
    series.l_rate[k] = rate.linear;
    series.q_rate[k] = rate.quadratic;
    series.r[k] = onroad_energy(spec, b, state);
    double dev = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      dev = std::max(dev, std::abs(state[i] - b[i]));
    }
    series.dev_inf[k] = dev;
  }
  return series;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::asymptotically_stable: return "asymptotically-stable";
    case Verdict::oscillatory: return "oscillatory";
    case Verdict::divergent: return "divergent";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

std::vector<std::size_t> peak_indices(const std::vector<double>& values,
                                      std::size_t from, std::size_t to) {
  std::vector<std::size_t> peaks;
  if (values.size() < 3) return peaks;
  const std::size_t lo = std::max<std::size_t>(from, 1);
  const std::size_t hi = std::min(to, values.size() - 1);
  for (std::size_t i = lo; i < hi; ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) {
      peaks.push_back(i);
    }
  }
  return peaks;
}

namespace {

std::vector<double> element_series(const Trajectory& traj, std::size_t element) {
  std::vector<double> out(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out[k] = traj.states[k][element];
  }
  return out;
}

// Cycle amplitudes: each consecutive peak pair contributes the drop from the
// leading peak to the trough between them.
std::vector<double> cycle_amplitudes(const std::vector<double>& values,
                                     const std::vector<std::size_t>& peaks) {
  std::vector<double> amps;
  for (std::size_t j = 0; j + 1 < peaks.size(); ++j) {
    const double trough =
        *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(peaks[j]),
                          values.begin() + static_cast<std::ptrdiff_t>(peaks[j + 1]) + 1);
    amps.push_back(values[peaks[j]] - trough);
  }
  return amps;
}

bool amplitudes_steady(const std::vector<double>& amps, double tolerance) {
  for (std::size_t j = 0; j + 1 < amps.size(); ++j) {
    if (std::abs(amps[j + 1] - amps[j]) >
        tolerance * std::max(std::abs(amps[j]), 1e-12)) {
      return false;
    }
  }
  return true;
}

}  // namespace

Classification classify(const SystemSpec& spec, const Trajectory& traj,
                        const State& b_base, const ClassifyOptions& options) {
  return classify(diagnostics_series(spec, traj, b_base), traj, options);
}

Classification classify(const DiagnosticsSeries& series, const Trajectory& traj,
                        const ClassifyOptions& options) {
  Classification result;
  const std::size_t count = series.times.size();
  if (count == 0) {
    result.note = "empty trajectory";
    return result;
  }

  const auto window_start = static_cast<std::size_t>(
      static_cast<double>(count) * (1.0 - options.trailing_fraction));
  const std::size_t w0 = std::min(window_start, count - 1);

  double mean_abs_r = 0.0;
  double max_dev = 0.0;
  for (std::size_t k = w0; k < count; ++k) {
    mean_abs_r += std::abs(series.r[k]);
    max_dev = std::max(max_dev, series.dev_inf[k]);
  }
  mean_abs_r /= static_cast<double>(count - w0);
  result.final_r = mean_abs_r;

  for (std::size_t k = 0; k < count; ++k) {
    if (std::abs(series.r[k]) > options.eps_osc) {
      result.onset_time = series.times[k];
      break;
    }
  }

  if (traj.diverged()) {
    result.verdict = Verdict::divergent;
    result.note = "magnitude guard exceeded at t = " +
                  std::to_string(*traj.blowup_time);
    return result;
  }

  if (mean_abs_r < options.eps_conv && max_dev < options.eps_state) {
    result.verdict = Verdict::asymptotically_stable;
    std::optional<std::size_t> last_violation;
    for (std::size_t k = 0; k < count; ++k) {
      if (series.dev_inf[k] >= options.eps_state) last_violation = k;
    }
    if (!last_violation) {
      result.convergence_time = 0.0;
    } else {
      // The trailing window is clean, so the sample after the last violation
      // always exists.
      result.convergence_time = series.times[*last_violation + 1];
    }
    return result;
  }

  if (mean_abs_r > options.eps_osc) {
    const auto lead = element_series(traj, 0);
    const auto lead_peaks = peak_indices(lead, w0, count);
    if (lead_peaks.size() >= 3) {
      bool steady = true;
      for (std::size_t i = 0; i < traj.spec.n && steady; ++i) {
        const auto values = element_series(traj, i);
        const auto peaks = peak_indices(values, w0, count);
        if (peaks.size() < 3) continue;  // too few cycles to judge; skip
        steady = amplitudes_steady(cycle_amplitudes(values, peaks),
                                   options.amplitude_tolerance);
      }
      if (steady) {
        result.verdict = Verdict::oscillatory;
        const auto metrics = oscillation_metrics(traj, options.trailing_fraction);
        result.cycle_period = metrics.period;
        result.cycle_amplitude = metrics.amplitude;
        return result;
      }
    }
  }

  result.verdict = Verdict::indeterminate;
  result.note = "trailing window is inconclusive; extend t_end";
  return result;
}

OscillationMetrics oscillation_metrics(const Trajectory& traj,
                                       double trailing_fraction) {
  const std::size_t count = traj.size();
  if (count == 0) throw std::runtime_error("empty trajectory");
  const auto window_start = static_cast<std::size_t>(
      static_cast<double>(count) * (1.0 - trailing_fraction));
  const std::size_t w0 = std::min(window_start, count - 1);

  const auto lead = element_series(traj, 0);
  const auto peaks = peak_indices(lead, w0, count);
  if (peaks.size() < 3) {
    throw std::runtime_error(
        "need at least 3 trailing peaks on element 1 to measure a period; "
        "extend t_end");
  }

  OscillationMetrics metrics;
  metrics.period = (traj.times[peaks.back()] - traj.times[peaks.front()]) /
                   static_cast<double>(peaks.size() - 1);
  metrics.amplitude.resize(traj.spec.n);
  for (std::size_t i = 0; i < traj.spec.n; ++i) {
    double lo = traj.states[w0][i];
    double hi = lo;
    for (std::size_t k = w0; k < count; ++k) {
      lo = std::min(lo, traj.states[k][i]);
      hi = std::max(hi, traj.states[k][i]);
    }
    metrics.amplitude[i] = hi - lo;
  }
  return metrics;
}

}  // namespace symode
