// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here; the checks run against the library only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "symode/diagnostics.hpp"
#include "symode/equilibria.hpp"
#include "symode/integrate.hpp"
#include "symode/scenarios.hpp"
#include "symode/system.hpp"

using namespace symode;

namespace {

struct Gate {
  int failures = 0;

  void report(int criterion, const std::string& label, bool ok,
              const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

struct ScenarioRun {
  Scenario scenario;
  Trajectory traj;
  DiagnosticsSeries series;
  Classification result;
};

ScenarioRun run_named(const std::vector<Scenario>& catalog, const char* name) {
  ScenarioRun run;
  run.scenario = *find_scenario(catalog, name);
  const State b = newton_fixed_point(run.scenario.spec).b;
  run.traj = simulate(run.scenario.spec, run.scenario.initial,
                      run.scenario.config, run.scenario.schedule);
  run.series = diagnostics_series(run.scenario.spec, run.traj, b);
  run.result = classify(run.series, run.traj);
  return run;
}

double logistic_exact(double e0, double t) {
  return 1.0 / (1.0 + (1.0 - e0) / e0 * std::exp(-0.5 * t));
}

double max_logistic_error(double dt, std::size_t stride) {
  const auto spec = SystemSpec::uniform(1, 1.0, 0.5, 0.5);
  const auto traj = simulate(spec, {0.5}, {dt, 20.0, stride});
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    worst = std::max(worst, std::abs(traj.states[k][0] -
                                     logistic_exact(0.5, traj.times[k])));
  }
  return worst;
}

// First time from which the given series stays below the bound; 0 when it
// never reaches the bound at all.
double settles_below(const std::vector<double>& times,
                     const std::vector<double>& values, double bound) {
  std::ptrdiff_t last_violation = -1;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(std::abs(values[k]) < bound)) {
      last_violation = static_cast<std::ptrdiff_t>(k);
    }
  }
  if (last_violation < 0) return 0.0;
  const auto next = static_cast<std::size_t>(last_violation) + 1;
  return next < times.size() ? times[next]
                             : std::numeric_limits<double>::infinity();
}

std::size_t trailing_start(std::size_t count) {
  return std::min(static_cast<std::size_t>(static_cast<double>(count) * 0.8),
                  count - 1);
}

double trailing_mean_abs(const std::vector<double>& values) {
  const std::size_t w0 = trailing_start(values.size());
  double sum = 0.0;
  for (std::size_t k = w0; k < values.size(); ++k) sum += std::abs(values[k]);
  return sum / static_cast<double>(values.size() - w0);
}

// Bucketed |R| means over 10 s windows must not decrease (within 2% of the
// peak bucket) before the first bucket that reaches 95% of the peak.
bool energy_ramp_monotone(const DiagnosticsSeries& series) {
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const auto bucket = static_cast<std::size_t>(series.times[k] / 10.0);
    if (bucket >= sums.size()) {
      sums.resize(bucket + 1, 0.0);
      counts.resize(bucket + 1, 0);
    }
    sums[bucket] += std::abs(series.r[k]);
    counts[bucket] += 1;
  }
  std::vector<double> means;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (counts[k] > 0) means.push_back(sums[k] / static_cast<double>(counts[k]));
  }
  if (means.empty()) return false;
  const double peak = *std::max_element(means.begin(), means.end());
  std::size_t saturated = means.size() - 1;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (means[k] >= 0.95 * peak) {
      saturated = k;
      break;
    }
  }
  for (std::size_t k = 0; k + 1 <= saturated; ++k) {
    if (means[k + 1] < means[k] - 0.02 * peak) return false;
  }
  return true;
}

SystemSpec random_log_uniform_spec(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(2.0));
  for (;;) {
    SystemSpec spec;
    spec.n = n;
    for (std::size_t i = 0; i < n; ++i) {
      spec.k1.push_back(std::exp(log_rate(rng)));
      spec.k2.push_back(std::exp(log_rate(rng)));
      spec.k3.push_back(std::exp(log_rate(rng)));
    }
    if (validate(spec).ok()) return spec;
  }
}

void criterion_1(Gate& gate, const std::vector<Scenario>& catalog) {
  const auto fig2 = run_named(catalog, "fig2");
  const double final_gap = std::abs(fig2.traj.states.back()[0] - 1.0);
  const double coarse = max_logistic_error(0.01, 1);
  const double fine = max_logistic_error(0.005, 2);
  const double ratio = fine > 0.0 ? coarse / fine : 0.0;
  const bool ok = final_gap < 1e-6 && coarse < 1e-8 && ratio >= 8.0 &&
                  ratio <= 32.0;
  gate.report(1, "single element relaxation matches the closed form", ok,
              fmt("final_gap=%.2e max_err=%.2e halving_ratio=%.1f", final_gap,
                  coarse, ratio));
}

void criterion_2(Gate& gate, const std::vector<Scenario>& catalog) {
  bool ok = true;
  std::string detail;

  const auto fast = newton_fixed_point(SystemSpec::uniform(5, 1.0, 0.5, 0.5));
  for (double bi : fast.b) ok = ok && bi == 1.0;
  if (!ok) detail = "uniform (1,0.5,0.5) did not solve to exactly 1";

  const auto slow = newton_fixed_point(SystemSpec::uniform(5, 1.0, 0.16, 0.5));
  bool slow_ok = slow.converged;
  for (double bi : slow.b) slow_ok = slow_ok && std::abs(bi - 1.68) <= 1e-12;
  if (!slow_ok && detail.empty()) detail = "uniform (1,0.16,0.5) missed 1.68";
  ok = ok && slow_ok;

  double worst_residual = 0.0;
  for (const auto& scenario : catalog) {
    const auto report = newton_fixed_point(scenario.spec);
    worst_residual = std::max(worst_residual, report.residual);
    if (!report.converged || report.residual > 1e-12) {
      ok = false;
      if (detail.empty()) detail = "newton stalled on " + scenario.name;
    }
  }
  if (detail.empty()) {
    detail = fmt("worst catalog residual=%.2e", worst_residual);
  }
  gate.report(2, "balance levels solve exactly across the catalog", ok, detail);
}

void criterion_3(Gate& gate, const std::vector<Scenario>& catalog) {
  const auto a = run_named(catalog, "fig3a");
  const auto b = run_named(catalog, "fig3b");
  const auto c = run_named(catalog, "fig3c");
  const auto d = run_named(catalog, "fig3d");

  bool ok = a.result.verdict == Verdict::asymptotically_stable &&
            b.result.verdict == Verdict::asymptotically_stable &&
            a.result.convergence_time && *a.result.convergence_time <= 50.0 &&
            b.result.convergence_time && *b.result.convergence_time <= 50.0;

  const bool c_ok = c.result.verdict == Verdict::asymptotically_stable &&
                    c.result.convergence_time && a.result.convergence_time &&
                    *c.result.convergence_time >=
                        5.0 * *a.result.convergence_time;
  ok = ok && c_ok;

  double trailing_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = trailing_start(d.traj.size()); k < d.traj.size(); ++k) {
    for (double x : d.traj.states[k]) trailing_min = std::min(trailing_min, x);
  }
  ok = ok && d.result.verdict == Verdict::oscillatory && trailing_min > 0.0;

  gate.report(
      3, "five element runs settle fast, settle slow, or keep cycling", ok,
      fmt("t_conv a/c=%.1f/%.1f cycle_floor=%.3f",
          a.result.convergence_time.value_or(-1.0),
          c.result.convergence_time.value_or(-1.0), trailing_min));
}

void criterion_4(Gate& gate, const std::vector<Scenario>& catalog) {
  const auto a = run_named(catalog, "fig5a");
  const auto b = run_named(catalog, "fig5b");
  const auto c = run_named(catalog, "fig5c");
  const auto d = run_named(catalog, "fig5d");

  bool ok = a.result.verdict == Verdict::asymptotically_stable &&
            b.result.verdict == Verdict::asymptotically_stable &&
            c.result.verdict == Verdict::oscillatory &&
            d.result.verdict == Verdict::oscillatory;

  const bool onset_ok = c.result.onset_time && *c.result.onset_time >= 30.0 &&
                        *c.result.onset_time <= 120.0;
  ok = ok && onset_ok;

  double worst_gap = 0.0;
  if (c.result.cycle_amplitude && d.result.cycle_amplitude) {
    for (std::size_t i = 0; i < 8; ++i) {
      const double ac = (*c.result.cycle_amplitude)[i];
      const double ad = (*d.result.cycle_amplitude)[i];
      worst_gap = std::max(worst_gap,
                           std::abs(ac - ad) / std::max(std::max(ac, ad), 1e-12));
    }
    ok = ok && worst_gap <= 0.05;
  } else {
    ok = false;
  }

  gate.report(4, "eight element reach decides settling versus cycling", ok,
              fmt("onset=%.1f amplitude_gap=%.2f%%",
                  c.result.onset_time.value_or(-1.0), 100.0 * worst_gap));
}

void criterion_5(Gate& gate, const std::vector<Scenario>& catalog) {
  bool ok = true;
  std::string detail;

  for (const char* name : {"fig5a", "fig5b"}) {
    const auto run = run_named(catalog, name);
    const double t_energy = settles_below(run.series.times, run.series.r, 1e-4);
    const double t_state =
        settles_below(run.series.times, run.series.dev_inf, 1e-3);
    if (!(t_energy <= t_state)) {
      ok = false;
      if (detail.empty()) {
        detail = std::string(name) +
                 fmt(": energy settled at %.1f after state at %.1f", t_energy,
                     t_state);
      }
    } else if (detail.empty()) {
      detail = fmt("energy leads state by %.1f s", t_state - t_energy);
    }
  }

  for (const char* name : {"fig5c", "fig5d"}) {
    const auto run = run_named(catalog, name);
    const double trailing = trailing_mean_abs(run.series.r);
    if (!(trailing > 1e-2)) {
      ok = false;
      detail = std::string(name) + fmt(": trailing |R| only %.2e", trailing);
    }
    if (!energy_ramp_monotone(run.series)) {
      ok = false;
      detail = std::string(name) + ": |R| ramp dips before saturation";
    }
  }

  gate.report(5, "on-road energy settles first or ramps up monotonically", ok,
              detail);
}

void criterion_6(Gate& gate, const std::vector<Scenario>& catalog) {
  bool ok = true;
  std::string detail;

  for (const char* name : {"fig7b", "fig7d"}) {
    const auto run = run_named(catalog, name);
    if (run.result.verdict != Verdict::asymptotically_stable) {
      ok = false;
      detail = std::string(name) + " did not settle";
      continue;
    }
    double residual = 0.0;
    const auto field =
        augmented_field(run.scenario.spec, run.traj.states.back(),
                        run.scenario.schedule, run.traj.times.back());
    for (double f : field) residual = std::max(residual, std::abs(f));
    if (!(residual < 1e-6)) {
      ok = false;
      detail = std::string(name) + fmt(": forced field residual %.2e", residual);
    }
    double late_r = 0.0;
    for (std::size_t k = 0; k < run.series.times.size(); ++k) {
      if (run.series.times[k] >= 450.0) {
        late_r = std::max(late_r, std::abs(run.series.r[k]));
      }
    }
    if (!(late_r < 1e-4)) {
      ok = false;
      detail = std::string(name) + fmt(": |R| still %.2e after t=450", late_r);
    }
  }

  {
    const auto run = run_named(catalog, "fig7d");
    double pre_sum = 0.0;
    std::size_t pre_count = 0;
    double post_max = 0.0;
    for (std::size_t k = 0; k < run.series.times.size(); ++k) {
      const double t = run.series.times[k];
      if (t >= 200.0 && t < 250.0) {
        pre_sum += std::abs(run.series.r[k]);
        ++pre_count;
      }
      if (t >= 250.0) post_max = std::max(post_max, std::abs(run.series.r[k]));
    }
    const double pre_mean = pre_count ? pre_sum / pre_count : 0.0;
    if (!(post_max > 2.0 * pre_mean)) {
      ok = false;
      detail = fmt("fig7d spike %.1f not above 2x pre-mean %.1f", post_max,
                   pre_mean);
    } else if (detail.empty()) {
      detail = fmt("fig7d spike %.1f vs pre-mean %.1f", post_max, pre_mean);
    }
  }

  for (const char* name : {"fig7a", "fig7c"}) {
    const auto run = run_named(catalog, name);
    if (run.result.verdict != Verdict::oscillatory) {
      ok = false;
      detail = std::string(name) + " stopped cycling";
    }
  }

  gate.report(6, "strong inputs lock the ring, weak inputs do not", ok, detail);
}

void criterion_7(Gate& gate) {
  std::mt19937 rng(70707);
  std::uniform_real_distribution<double> level(0.0, 5.0);
  const std::size_t sizes[] = {3, 5, 8};
  int in_bounds = 0;
  const int total = 100;
  for (int trial = 0; trial < total; ++trial) {
    const auto spec = random_log_uniform_spec(rng, sizes[trial % 3]);
    State initial(spec.n);
    for (auto& v : initial) v = std::max(level(rng), 1e-6);
    const auto traj = simulate(spec, initial, {0.01, 200.0, 10});
    bool good = !traj.diverged() && !traj.first_nonpositive_time;
    for (const auto& state : traj.states) {
      for (double x : state) good = good && x > 0.0 && x < 1e6;
    }
    in_bounds += good ? 1 : 0;
  }
  gate.report(7, "random valid rings stay positive and bounded", in_bounds == total,
              fmt("%.0f/100 runs inside (0, 1e6)", double(in_bounds)));
}

void criterion_8(Gate& gate) {
  std::mt19937 rng(80808);
  std::uniform_real_distribution<double> gen(0.8, 1.2);
  std::uniform_real_distribution<double> other(0.3, 0.7);
  int sandwiched = 0;
  const int total = 50;
  for (int trial = 0; trial < total; ++trial) {
    SystemSpec spec;
    spec.n = 5;
    for (std::size_t i = 0; i < 5; ++i) {
      spec.k1.push_back(gen(rng));
      spec.k2.push_back(other(rng));
      spec.k3.push_back(other(rng));
    }
    if (!validate(spec).ok()) {
      --trial;
      continue;
    }
    const auto report = newton_fixed_point(spec);
    if (report.converged && report.sandwich_ok) ++sandwiched;
  }
  gate.report(8, "solved balances sit inside the bounding levels",
              sandwiched == total,
              fmt("%.0f/50 inside [b_min, b_max] with 1e-9 slack",
                  double(sandwiched)));
}

void criterion_9(Gate& gate) {
  const auto base = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const double factors[] = {0.9, 0.95, 1.0, 1.05, 1.1};
  bool ok = true;
  std::string detail = "75 solves over +-10% grids";

  for (int family = 0; family < 3 && ok; ++family) {
    for (std::size_t j = 0; j < 5 && ok; ++j) {
      double prev = 0.0;
      bool first = true;
      for (double factor : factors) {
        auto spec = base;
        auto& rates = family == 0 ? spec.k1 : family == 1 ? spec.k2 : spec.k3;
        rates[j] *= factor;
        const auto report = newton_fixed_point(spec);
        if (!report.converged) {
          ok = false;
          detail = "newton stalled inside the grid";
          break;
        }
        const double value = report.b[j];
        if (!first) {
          const bool rising = family == 0;
          if (rising && value < prev - 1e-9) ok = false;
          if (!rising && value > prev + 1e-9) ok = false;
          if (!ok) {
            detail = fmt("family %.0f element %.0f broke monotonicity",
                         double(family + 1), double(j + 1));
          }
        }
        prev = value;
        first = false;
      }
    }
  }
  gate.report(9, "own-rate nudges move the balance the expected way", ok, detail);
}

void criterion_10(Gate& gate) {
  auto spec = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  spec.k1 = {0.9, 0.95, 1.0, 1.05, 1.1};

  const auto max_step = [&](std::size_t steps, bool& complete) {
    const auto path = homotopy_path(spec, steps);
    complete = path.complete;
    double worst = 0.0;
    for (std::size_t j = 1; j < path.points.size(); ++j) {
      for (std::size_t i = 0; i < spec.n; ++i) {
        worst = std::max(worst, std::abs(path.points[j].b[i] -
                                         path.points[j - 1].b[i]));
      }
    }
    return worst;
  };

  bool coarse_complete = false;
  bool fine_complete = false;
  const double coarse = max_step(16, coarse_complete);
  const double fine = max_step(256, fine_complete);

  const auto path = homotopy_path(spec, 16);
  double endpoint_gap = 0.0;
  for (double bi : path.points.front().b) {
    endpoint_gap = std::max(endpoint_gap, std::abs(bi - 1.2));
  }
  for (double bi : path.points.back().b) {
    endpoint_gap = std::max(endpoint_gap, std::abs(bi - 0.8));
  }

  const bool ok = coarse_complete && fine_complete && fine < coarse / 8.0 &&
                  endpoint_gap <= 1e-10;
  gate.report(10, "the bounding deformation is continuous end to end", ok,
              fmt("step ratio=%.1f endpoint_gap=%.1e", coarse / fine,
                  endpoint_gap));
}

void criterion_11(Gate& gate) {
  std::mt19937 rng(111111);
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  std::uniform_real_distribution<double> level(-2.0, 5.0);
  double worst_part = 0.0;
  double worst_rate = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    SystemSpec spec;
    spec.n = 1 + rng() % 8;
    spec.gen_offset = -1 - static_cast<int>(rng() % 3);
    spec.sup_offset = -1 - static_cast<int>(rng() % 3);
    for (std::size_t i = 0; i < spec.n; ++i) {
      spec.k1.push_back(rate(rng));
      spec.k2.push_back(rate(rng));
      spec.k3.push_back(rate(rng));
    }
    State b(spec.n);
    State x(spec.n);
    for (auto& v : b) v = level(rng);
    for (auto& v : x) v = level(rng);

    const auto field = vector_field(spec, x);
    const auto parts = decompose_field(spec, b, x);
    double field_sum = 0.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double sum = parts.f_of_b[i] + parts.l_of_d[i] + parts.q_of_d[i];
      const double scale =
          std::max(1.0, std::abs(parts.f_of_b[i]) + std::abs(parts.l_of_d[i]) +
                            std::abs(parts.q_of_d[i]));
      worst_part = std::max(worst_part, std::abs(sum - field[i]) / scale);
      field_sum += field[i];
    }
    const auto split = lyapunov_rate(spec, x);
    const double scale =
        std::max(1.0, std::abs(split.linear) + std::abs(split.quadratic));
    worst_rate =
        std::max(worst_rate, std::abs(split.total() - field_sum) / scale);
  }
  const bool ok = worst_part <= 1e-12 && worst_rate <= 1e-12;
  gate.report(11, "field splits and energy rates agree identically", ok,
              fmt("worst split=%.1e worst rate=%.1e", worst_part, worst_rate));
}

}  // namespace

int main() {
  Gate gate;
  const auto catalog = builtin_catalog();
  criterion_1(gate, catalog);
  criterion_2(gate, catalog);
  criterion_3(gate, catalog);
  criterion_4(gate, catalog);
  criterion_5(gate, catalog);
  criterion_6(gate, catalog);
  criterion_7(gate);
  criterion_8(gate);
  criterion_9(gate);
  criterion_10(gate);
  criterion_11(gate);
  if (gate.failures == 0) {
    std::printf("all 11 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", gate.failures);
  return 1;
}
