#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "symode/diagnostics.hpp"
#include "symode/equilibria.hpp"
#include "symode/integrate.hpp"
#include "symode/system.hpp"

namespace symode {

/// A fully specified experiment: system, initial state, integration window,
/// scheduled inputs, and (optionally) the verdict the run is expected to
/// produce.
struct Scenario {
  std::string name;         // unique within a catalog; used for artifact dirs
  std::string figure;       // catalog tag grouping related runs
  std::string description;  // one line, shown by list-scenarios
  SystemSpec spec;
  State initial;
  IntegratorConfig config;
  InputSchedule schedule;
  std::optional<Verdict> expected;
};

/// The built-in experiment catalog: the single-element relaxation and
/// divergence pair, the five-element quartet (fast/slow decay, deviation
/// 1/5), the eight-element quartet (suppressive reach 2/3), and the four
/// constant-input suppression runs. 14 scenarios total.
std::vector<Scenario> builtin_catalog();

/// nullptr when no scenario has that name.
const Scenario* find_scenario(const std::vector<Scenario>& catalog,
                              const std::string& name);

/// Parses the .scn text format. Throws std::runtime_error with a line-number
/// message on malformed input.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serializes with full double precision; parse_scenario(serialize(s)) runs
/// bit-identically to s.
std::string serialize_scenario(const Scenario& scenario);

enum class SeedMode { averaged, componentwise };

struct RunOptions {
  bool write_plot = true;
  bool append_diagnostics = false;  // diagnostics columns inside trajectory.csv
  ClassifyOptions classify;
  SeedMode seed_mode = SeedMode::averaged;
};

/// Baseline equilibrium used for deviations: the Newton chain starting from
/// the seed the mode selects.
EquilibriumReport solve_baseline(const SystemSpec& spec, SeedMode mode);

struct RunArtifacts {
  std::filesystem::path dir;
  std::filesystem::path trajectory_csv;
  std::filesystem::path diagnostics_csv;
  std::filesystem::path classification_json;
  std::filesystem::path plot_svg;  // empty when plotting is off
  EquilibriumReport equilibrium;
  Classification classification;
  std::optional<bool> matched;  // set iff the scenario carries an expectation
};

/// simulate -> diagnostics -> classify -> write artifacts under
/// out_dir/<scenario name>/. All files are written atomically.
RunArtifacts run_scenario(const Scenario& scenario,
                          const std::filesystem::path& out_dir,
                          const RunOptions& options = {});

/// One sweep axis: which knob to turn and the values to visit.
///   k1 | k2 | k3        set the whole family uniformly
///   k1[i] | k2[i] | k3[i]  set one element's rate (i is 1-based)
///   init[i]             set one element's initial value
///   dev[i]              initial = fixed point, plus this value on element i
struct AxisSelector {
  enum class Kind {
    k1_uniform,
    k2_uniform,
    k3_uniform,
    k1_element,
    k2_element,
    k3_element,
    init_element,
    dev_element,
  };
  Kind kind = Kind::k2_uniform;
  std::size_t element = 0;  // 0-based; used by the _element kinds

  static AxisSelector parse(const std::string& text);
  std::string to_string() const;
};

struct SweepAxis {
  AxisSelector selector;
  std::vector<double> values;
};

struct SweepGrid {
  Scenario base;
  SweepAxis axis1;
  SweepAxis axis2;
};

/// One classified grid cell. error is set (and the metrics left empty) when
/// the cell's run threw; failures never abort the sweep.
struct SweepCell {
  double axis1 = 0.0;
  double axis2 = 0.0;
  std::string verdict;
  std::optional<double> final_r;
  std::optional<double> period;
  std::optional<double> amplitude_e1;
  std::string error;
};

struct SweepResult {
  SweepGrid grid;
  std::vector<SweepCell> cells;  // axis1-major order
};

/// Grid-file loader. `catalog` resolves builtin base names; paths load .scn
/// files.
SweepGrid load_sweep_file(const std::filesystem::path& path,
                          const std::vector<Scenario>& catalog);

/// Runs every cell, fanning out across hardware threads; cells are
/// independent (threads = 0 picks the hardware count).
SweepResult run_sweep(const SweepGrid& grid, unsigned threads = 0,
                      const ClassifyOptions& classify_options = {});

/// Header `axis1,axis2,verdict,final_r,period,amplitude_e1`; absent metrics
/// are empty fields.
std::string sweep_csv(const SweepResult& result);

std::optional<Verdict> verdict_from_string(const std::string& text);

}  // namespace symode
