#include "symode/scenarios.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "symode/csv.hpp"
#include "symode/svg_plot.hpp"

namespace symode {

namespace {

Scenario make(std::string name, std::string figure, std::string description,
              SystemSpec spec, State initial, double t_end, Verdict expected,
              InputSchedule schedule = {}) {
  Scenario scenario;
  scenario.name = std::move(name);
  scenario.figure = std::move(figure);
  scenario.description = std::move(description);
  scenario.spec = std::move(spec);
  scenario.initial = std::move(initial);
  scenario.config.t_end = t_end;
  scenario.schedule = std::move(schedule);
  scenario.expected = expected;
  return scenario;
}

State deviated(std::size_t n, double base, std::size_t element, double dev) {
  State state(n, base);
  state[element] += dev;
  return state;
}

}  // namespace

std::vector<Scenario> builtin_catalog() {
  std::vector<Scenario> catalog;

  const auto n1 = SystemSpec::uniform(1, 1.0, 0.5, 0.5);
  catalog.push_back(make(
      "fig2", "2", "single element relaxing onto its balance level from below",
      n1, {0.5}, 30.0, Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig2-neg", "2",
      "single element started below zero escapes to negative infinity", n1,
      {-0.1}, 30.0, Verdict::divergent));

  const auto n5_fast = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const auto n5_slow = SystemSpec::uniform(5, 1.0, 0.16, 0.5);
  catalog.push_back(make(
      "fig3a", "3a", "five elements, deviation 1, quick return to level 1",
      n5_fast, deviated(5, 1.0, 0, 1.0), 100.0,
      Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig3b", "3b", "five elements, deviation 5, quick return to level 1",
      n5_fast, deviated(5, 1.0, 0, 5.0), 100.0,
      Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig3c", "3c",
      "five elements with slow decay, deviation 1, long ringing return to 1.68",
      n5_slow, deviated(5, 1.68, 0, 1.0), 800.0,
      Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig3d", "3d",
      "five elements with slow decay, deviation 5, sustained oscillation",
      n5_slow, deviated(5, 1.68, 0, 5.0), 1000.0, Verdict::oscillatory));

  const auto n8_near = SystemSpec::uniform(8, 1.0, 0.5, 0.5, -1, -2);
  const auto n8_far = SystemSpec::uniform(8, 1.0, 0.5, 0.5, -1, -3);
  catalog.push_back(make(
      "fig5a", "5a", "eight elements, suppressive reach 2, deviation 1 settles",
      n8_near, deviated(8, 1.0, 0, 1.0), 100.0,
      Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig5b", "5b", "eight elements, suppressive reach 2, deviation 5 settles",
      n8_near, deviated(8, 1.0, 0, 5.0), 100.0,
      Verdict::asymptotically_stable));
  catalog.push_back(make(
      "fig5c", "5c",
      "eight elements, suppressive reach 3, deviation 0.01 grows into "
      "oscillation",
      n8_far, deviated(8, 1.0, 0, 0.01), 500.0, Verdict::oscillatory));
  catalog.push_back(make(
      "fig5d", "5d",
      "eight elements, suppressive reach 3, deviation 5 oscillates at once",
      n8_far, deviated(8, 1.0, 0, 5.0), 500.0, Verdict::oscillatory));

  const InputSchedule inject_05 = {{0, 250.0, std::nullopt, 0.5}};
  const InputSchedule inject_15 = {{0, 250.0, std::nullopt, 1.5}};
  const InputSchedule inject_10 = {{0, 250.0, std::nullopt, 1.0}};
  catalog.push_back(make(
      "fig7a", "7a",
      "oscillating five-element run; constant input 0.5 on element 1 from "
      "t=250 fails to quench it",
      n5_slow, deviated(5, 1.68, 0, 5.0), 1000.0, Verdict::oscillatory,
      inject_05));
  catalog.push_back(make(
      "fig7b", "7b",
      "oscillating five-element run; input 1.5 from t=250 locks it onto a new "
      "fixed point",
      n5_slow, deviated(5, 1.68, 0, 5.0), 600.0,
      Verdict::asymptotically_stable, inject_15));
  catalog.push_back(make(
      "fig7c", "7c",
      "oscillating eight-element run; input 0.5 on element 1 from t=250 fails "
      "to quench it",
      n8_far, deviated(8, 1.0, 0, 5.0), 600.0, Verdict::oscillatory,
      inject_05));
  catalog.push_back(make(
      "fig7d", "7d",
      "oscillating eight-element run; input 1.0 from t=250 locks it onto a new "
      "fixed point",
      n8_far, deviated(8, 1.0, 0, 5.0), 700.0,
      Verdict::asymptotically_stable, inject_10));

  return catalog;
}

const Scenario* find_scenario(const std::vector<Scenario>& catalog,
                              const std::string& name) {
  for (const auto& scenario : catalog) {
    if (scenario.name == name) return &scenario;
  }
  return nullptr;
}

EquilibriumReport solve_baseline(const SystemSpec& spec, SeedMode mode) {
  if (mode == SeedMode::componentwise) {
    auto report = newton_fixed_point(spec, componentwise_seed(spec));
    if (report.converged) return report;
  }
  return newton_fixed_point(spec);
}

RunArtifacts run_scenario(const Scenario& scenario,
                          const std::filesystem::path& out_dir,
                          const RunOptions& options) {
  require_valid(scenario.spec);
  if (scenario.initial.size() != scenario.spec.n) {
    throw std::invalid_argument("scenario '" + scenario.name +
                                "' initial length does not match n");
  }

  RunArtifacts artifacts;
  artifacts.dir = out_dir / scenario.name;
  artifacts.equilibrium = solve_baseline(scenario.spec, options.seed_mode);

  const auto traj = simulate(scenario.spec, scenario.initial, scenario.config,
                             scenario.schedule);
  const auto series =
      diagnostics_series(scenario.spec, traj, artifacts.equilibrium.b);
  artifacts.classification = classify(series, traj, options.classify);

  artifacts.trajectory_csv = artifacts.dir / "trajectory.csv";
  if (options.append_diagnostics) {
    write_file_atomic(artifacts.trajectory_csv, combined_csv(traj, series));
    artifacts.diagnostics_csv = artifacts.trajectory_csv;
  } else {
    write_file_atomic(artifacts.trajectory_csv, trajectory_csv(traj));
    artifacts.diagnostics_csv = artifacts.dir / "diagnostics.csv";
    write_file_atomic(artifacts.diagnostics_csv, diagnostics_csv(series));
  }
  artifacts.classification_json = artifacts.dir / "classification.json";
  write_file_atomic(artifacts.classification_json,
                    classification_json(artifacts.classification));
  if (options.write_plot) {
    artifacts.plot_svg = artifacts.dir / "plot.svg";
    write_file_atomic(artifacts.plot_svg,
                      scenario_plot_svg(traj, series, scenario.name));
  }

  if (scenario.expected) {
    artifacts.matched = artifacts.classification.verdict == *scenario.expected;
  }
  return artifacts;
}

namespace {

void apply_spec_axis(Scenario& cell, const AxisSelector& selector, double value) {
  using Kind = AxisSelector::Kind;
  const std::size_t n = cell.spec.n;
  if ((selector.kind == Kind::k1_element || selector.kind == Kind::k2_element ||
       selector.kind == Kind::k3_element ||
       selector.kind == Kind::init_element ||
       selector.kind == Kind::dev_element) &&
      selector.element >= n) {
    throw std::invalid_argument("axis " + selector.to_string() +
                                " targets an element outside the system");
  }
  switch (selector.kind) {
    case Kind::k1_uniform: cell.spec.k1.assign(n, value); break;
    case Kind::k2_uniform: cell.spec.k2.assign(n, value); break;
    case Kind::k3_uniform: cell.spec.k3.assign(n, value); break;
    case Kind::k1_element: cell.spec.k1[selector.element] = value; break;
    case Kind::k2_element: cell.spec.k2[selector.element] = value; break;
    case Kind::k3_element: cell.spec.k3[selector.element] = value; break;
    default: break;  // state axes applied once the rates are final
  }
}

SweepCell run_cell(const SweepGrid& grid, double v1, double v2,
                   const ClassifyOptions& classify_options) {
  SweepCell cell;
  cell.axis1 = v1;
  cell.axis2 = v2;
  try {
    Scenario scenario = grid.base;
    apply_spec_axis(scenario, grid.axis1.selector, v1);
    apply_spec_axis(scenario, grid.axis2.selector, v2);
    require_valid(scenario.spec);

    using Kind = AxisSelector::Kind;
    const bool needs_baseline =
        grid.axis1.selector.kind == Kind::dev_element ||
        grid.axis2.selector.kind == Kind::dev_element;
    State baseline;
    if (needs_baseline) {
      baseline = newton_fixed_point(scenario.spec).b;
      scenario.initial = baseline;
    }
    const auto apply_state_axis = [&](const AxisSelector& selector, double value) {
      if (selector.kind == Kind::init_element) {
        scenario.initial[selector.element] = value;
      } else if (selector.kind == Kind::dev_element) {
        scenario.initial[selector.element] = baseline[selector.element] + value;
      }
    };
    apply_state_axis(grid.axis1.selector, v1);
    apply_state_axis(grid.axis2.selector, v2);

    const auto b = newton_fixed_point(scenario.spec).b;
    const auto traj = simulate(scenario.spec, scenario.initial, scenario.config,
                               scenario.schedule);
    const auto result = classify(scenario.spec, traj, b, classify_options);
    cell.verdict = to_string(result.verdict);
    cell.final_r = result.final_r;
    cell.period = result.cycle_period;
    if (result.cycle_amplitude && !result.cycle_amplitude->empty()) {
      cell.amplitude_e1 = result.cycle_amplitude->front();
    }
  } catch (const std::exception& error) {
    cell.verdict = "error";
    cell.error = error.what();
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const SweepGrid& grid, unsigned threads,
                      const ClassifyOptions& classify_options) {
  SweepResult result;
  result.grid = grid;
  const std::size_t rows = grid.axis1.values.size();
  const std::size_t cols = grid.axis2.values.size();
  const std::size_t total = rows * cols;
  result.cells.resize(total);

  unsigned worker_count = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (worker_count == 0) worker_count = 1;
  worker_count = static_cast<unsigned>(
      std::min<std::size_t>(worker_count, total));

  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= total) return;
      const double v1 = grid.axis1.values[index / cols];
      const double v2 = grid.axis2.values[index % cols];
      result.cells[index] = run_cell(grid, v1, v2, classify_options);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "axis1,axis2,verdict,final_r,period,amplitude_e1\n";
  for (const auto& cell : result.cells) {
    out += format_g17(cell.axis1);
    out += ',';
    out += format_g17(cell.axis2);
    out += ',';
    out += cell.verdict;
    out += ',';
    if (cell.final_r) out += format_g17(*cell.final_r);
    out += ',';
    if (cell.period) out += format_g17(*cell.period);
    out += ',';
    if (cell.amplitude_e1) out += format_g17(*cell.amplitude_e1);
    out += '\n';
  }
  return out;
}

}  // namespace symode
