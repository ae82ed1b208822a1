#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "symode/csv.hpp"
#include "symode/scenarios.hpp"

namespace {

using namespace symode;

/// Bad input from the operator (unknown name, malformed file, invalid
/// override). Exits 2, as opposed to numerical/runtime failures, which
/// exit 3.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::size_t> stride;
  std::optional<double> eps_conv;
  std::optional<double> eps_osc;
  std::string seed_mode = "averaged";
  std::string plot = "on";
  std::string out = "out";
  bool append_diagnostics = false;
};

void add_run_flags(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--dt", options.dt, "integrator step override");
  cmd->add_option("--t-end", options.t_end, "integration window override");
  cmd->add_option("--stride", options.stride, "recording stride override");
  cmd->add_option("--eps-conv", options.eps_conv,
                  "settled threshold on trailing mean |R|");
  cmd->add_option("--eps-osc", options.eps_osc,
                  "active threshold on trailing mean |R|");
  cmd->add_option("--seed-mode", options.seed_mode,
                  "equilibrium seed: averaged|componentwise")
      ->check(CLI::IsMember({"averaged", "componentwise"}));
  cmd->add_option("--plot", options.plot, "write SVG plots: on|off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--out", options.out, "artifact directory");
  cmd->add_flag("--append-diagnostics", options.append_diagnostics,
                "append diagnostics columns to trajectory.csv instead of "
                "writing a separate file");
}

void apply_overrides(Scenario& scenario, const CommonOptions& options) {
  if (options.dt) {
    if (!(*options.dt > 0.0)) {
      throw UsageError("--dt must be positive, got " +
                       std::to_string(*options.dt));
    }
    scenario.config.dt = *options.dt;
  }
  if (options.t_end) {
    if (!(*options.t_end >= 0.0)) {
      throw UsageError("--t-end must be nonnegative, got " +
                       std::to_string(*options.t_end));
    }
    scenario.config.t_end = *options.t_end;
  }
  if (options.stride) {
    if (*options.stride == 0) throw UsageError("--stride must be >= 1");
    scenario.config.record_stride = *options.stride;
  }
}

RunOptions to_run_options(const CommonOptions& options) {
  RunOptions run;
  run.write_plot = options.plot == "on";
  run.append_diagnostics = options.append_diagnostics;
  run.seed_mode = options.seed_mode == "componentwise"
                      ? SeedMode::componentwise
                      : SeedMode::averaged;
  if (options.eps_conv) {
    if (!(*options.eps_conv > 0.0)) throw UsageError("--eps-conv must be positive");
    run.classify.eps_conv = *options.eps_conv;
  }
  if (options.eps_osc) {
    if (!(*options.eps_osc > 0.0)) throw UsageError("--eps-osc must be positive");
    run.classify.eps_osc = *options.eps_osc;
  }
  return run;
}

std::string catalog_names(const std::vector<Scenario>& catalog) {
  std::string out;
  for (const auto& scenario : catalog) {
    if (!out.empty()) out += ", ";
    out += scenario.name;
  }
  return out;
}

Scenario resolve_scenario(const std::string& target,
                          const std::vector<Scenario>& catalog) {
  if (const Scenario* builtin = find_scenario(catalog, target)) return *builtin;
  if (std::filesystem::exists(target)) {
    try {
      return load_scenario_file(target);
    } catch (const std::exception& error) {
      throw UsageError(error.what());
    }
  }
  throw UsageError("unknown scenario '" + target +
                   "'; builtin names: " + catalog_names(catalog));
}

std::string compact_list(const std::vector<double>& values) {
  bool uniform = true;
  for (double v : values) uniform = uniform && v == values.front();
  if (uniform && !values.empty()) return format_g17(values.front());
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_g17(values[i]);
  }
  return out;
}

void print_run_summary(const Scenario& scenario, const RunArtifacts& artifacts) {
  std::printf("%-8s verdict=%-22s final_r=%-12.5g", scenario.name.c_str(),
              to_string(artifacts.classification.verdict).c_str(),
              artifacts.classification.final_r);
  if (artifacts.classification.convergence_time) {
    std::printf(" t_conv=%-8.4g", *artifacts.classification.convergence_time);
  } else if (artifacts.classification.cycle_period) {
    std::printf(" period=%-8.4g", *artifacts.classification.cycle_period);
  }
  if (artifacts.matched) {
    std::printf(" expected=%-22s %s",
                to_string(*scenario.expected).c_str(),
                *artifacts.matched ? "match" : "MISMATCH");
  }
  std::printf("\n");
}

int cmd_simulate(const std::string& target, const CommonOptions& options,
                 const std::vector<Scenario>& catalog, bool print_json) {
  Scenario scenario = resolve_scenario(target, catalog);
  apply_overrides(scenario, options);
  const auto artifacts = run_scenario(scenario, options.out, to_run_options(options));
  if (print_json) {
    std::fputs(classification_json(artifacts.classification).c_str(), stdout);
  } else {
    print_run_summary(scenario, artifacts);
    std::printf("artifacts: %s\n", artifacts.dir.string().c_str());
  }
  if (artifacts.matched && !*artifacts.matched) {
    std::fprintf(stderr, "expectation mismatch: expected %s, got %s\n",
                 to_string(*scenario.expected).c_str(),
                 to_string(artifacts.classification.verdict).c_str());
    return 1;
  }
  return 0;
}

int cmd_equilibrium(const std::string& target,
                    const std::vector<double>& uniform, std::size_t n,
                    int gen_offset, int sup_offset,
                    const CommonOptions& options,
                    const std::vector<Scenario>& catalog) {
  SystemSpec spec;
  if (!uniform.empty()) {
    if (n == 0) throw UsageError("--uniform needs --n");
    spec = SystemSpec::uniform(n, uniform[0], uniform[1], uniform[2],
                               gen_offset, sup_offset);
  } else if (!target.empty()) {
    spec = resolve_scenario(target, catalog).spec;
  } else {
    throw UsageError("pass a scenario or --uniform k1 k2 k3 --n N");
  }
  require_valid(spec);
  const auto mode = options.seed_mode == "componentwise"
                        ? SeedMode::componentwise
                        : SeedMode::averaged;
  const auto report = solve_baseline(spec, mode);
  std::fputs(equilibrium_json(report).c_str(), stdout);
  return 0;
}

int cmd_reproduce(const std::string& target, const CommonOptions& options,
                  const std::vector<Scenario>& catalog) {
  std::vector<Scenario> selected;
  if (target == "all") {
    selected = catalog;
  } else if (const Scenario* builtin = find_scenario(catalog, target)) {
    selected.push_back(*builtin);
  } else {
    throw UsageError("unknown figure id '" + target +
                     "'; builtin names: " + catalog_names(catalog));
  }
  for (auto& scenario : selected) apply_overrides(scenario, options);
  const auto run_options = to_run_options(options);
  std::filesystem::create_directories(options.out);

  struct Outcome {
    RunArtifacts artifacts;
    std::string error;
  };
  std::vector<Outcome> outcomes(selected.size());
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    while (true) {
      const std::size_t index = cursor.fetch_add(1);
      if (index >= selected.size()) return;
      try {
        outcomes[index].artifacts =
            run_scenario(selected[index], options.out, run_options);
      } catch (const std::exception& error) {
        outcomes[index].error = error.what();
      }
    }
  };
  unsigned worker_count = std::thread::hardware_concurrency();
  if (worker_count == 0) worker_count = 1;
  worker_count = static_cast<unsigned>(
      std::min<std::size_t>(worker_count, selected.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();

  bool all_ok = true;
  bool numeric_failure = false;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      std::printf("%-8s ERROR %s\n", selected[i].name.c_str(),
                  outcomes[i].error.c_str());
      numeric_failure = true;
      continue;
    }
    print_run_summary(selected[i], outcomes[i].artifacts);
    if (outcomes[i].artifacts.matched && !*outcomes[i].artifacts.matched) {
      all_ok = false;
    }
  }
  if (numeric_failure) return 3;
  return all_ok ? 0 : 1;
}

int cmd_sweep(const std::string& grid_path, unsigned threads,
              const CommonOptions& options,
              const std::vector<Scenario>& catalog) {
  SweepGrid grid;
  try {
    grid = load_sweep_file(grid_path, catalog);
  } catch (const std::exception& error) {
    throw UsageError(error.what());
  }
  apply_overrides(grid.base, options);
  ClassifyOptions classify_options;
  if (options.eps_conv) classify_options.eps_conv = *options.eps_conv;
  if (options.eps_osc) classify_options.eps_osc = *options.eps_osc;

  const auto result = run_sweep(grid, threads, classify_options);
  const auto csv = sweep_csv(result);
  const auto stem = std::filesystem::path(grid_path).stem().string();
  const auto out_path = std::filesystem::path(options.out) / (stem + ".csv");
  write_file_atomic(out_path, csv);
  std::fputs(csv.c_str(), stdout);
  std::fprintf(stderr, "sweep written to %s\n", out_path.string().c_str());
  return 0;
}

int cmd_list(const std::vector<Scenario>& catalog) {
  for (const auto& scenario : catalog) {
    std::string inputs;
    for (const auto& input : scenario.schedule) {
      inputs += " input(e" + std::to_string(input.element + 1) + " t>=" +
                format_g17(input.t_start) +
                (input.t_stop ? " t<" + format_g17(*input.t_stop) : "") +
                " amp=" + format_g17(input.amplitude) + ")";
    }
    std::printf("%-8s [%s] n=%zu offsets(%d,%d) k1=%s k2=%s k3=%s t_end=%s%s",
                scenario.name.c_str(), scenario.figure.c_str(), scenario.spec.n,
                scenario.spec.gen_offset, scenario.spec.sup_offset,
                compact_list(scenario.spec.k1).c_str(),
                compact_list(scenario.spec.k2).c_str(),
                compact_list(scenario.spec.k3).c_str(),
                format_g17(scenario.config.t_end).c_str(), inputs.c_str());
    if (scenario.expected) {
      std::printf(" expected=%s", to_string(*scenario.expected).c_str());
    }
    std::printf("\n         E0=(%s)\n         %s\n",
                compact_list(scenario.initial).c_str(),
                scenario.description.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for cyclic symmetric differential systems"};
  app.require_subcommand(1);

  const auto catalog = builtin_catalog();

  CommonOptions options;
  std::string target;
  std::vector<double> uniform;
  std::size_t n = 0;
  int gen_offset = -1;
  int sup_offset = -2;
  unsigned threads = 0;

  auto* simulate_cmd =
      app.add_subcommand("simulate", "run a scenario and write artifacts");
  simulate_cmd->add_option("scenario", target, "builtin name or .scn path")
      ->required();
  add_run_flags(simulate_cmd, options);

  auto* equilibrium_cmd = app.add_subcommand(
      "equilibrium", "solve the fixed point and print the report as JSON");
  equilibrium_cmd->add_option("scenario", target, "builtin name or .scn path");
  equilibrium_cmd->add_option("--uniform", uniform,
                              "uniform rates k1 k2 k3 (with --n)")
      ->expected(3);
  equilibrium_cmd->add_option("--n", n, "system size for --uniform");
  equilibrium_cmd->add_option("--gen-offset", gen_offset,
                              "generative offset for --uniform");
  equilibrium_cmd->add_option("--sup-offset", sup_offset,
                              "suppressive offset for --uniform");
  equilibrium_cmd
      ->add_option("--seed-mode", options.seed_mode,
                   "equilibrium seed: averaged|componentwise")
      ->check(CLI::IsMember({"averaged", "componentwise"}));

  auto* classify_cmd = app.add_subcommand(
      "classify", "run a scenario and print its classification as JSON");
  classify_cmd->add_option("scenario", target, "builtin name or .scn path")
      ->required();
  add_run_flags(classify_cmd, options);

  auto* reproduce_cmd = app.add_subcommand(
      "reproduce", "run builtin scenarios and check their expected verdicts");
  reproduce_cmd->add_option("figure", target, "scenario name or 'all'")
      ->required();
  add_run_flags(reproduce_cmd, options);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "run a 2-axis grid of classified runs");
  sweep_cmd->add_option("grid", target, "sweep grid file")->required();
  sweep_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  add_run_flags(sweep_cmd, options);

  auto* list_cmd =
      app.add_subcommand("list-scenarios", "print the builtin catalog");
  (void)list_cmd;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(target, options, catalog, false);
    if (equilibrium_cmd->parsed()) {
      return cmd_equilibrium(target, uniform, n, gen_offset, sup_offset,
                             options, catalog);
    }
    if (classify_cmd->parsed()) return cmd_simulate(target, options, catalog, true);
    if (reproduce_cmd->parsed()) return cmd_reproduce(target, options, catalog);
    if (sweep_cmd->parsed()) return cmd_sweep(target, threads, options, catalog);
    if (list_cmd->parsed()) return cmd_list(catalog);
  } catch (const UsageError& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  } catch (const std::invalid_argument& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "failure: %s\n", error.what());
    return 3;
  }
  return 2;
}
