#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symode/integrate.hpp"
#include "symode/system.hpp"

namespace symode {

enum class SolveMethod {
  analytic_1d,
  analytic_2d,
  averaged_approx,
  newton,
  brouwer_iteration,
  homotopy,
};

std::string to_string(SolveMethod method);

/// Solver output. residual is the max-norm of the field at b. b_min and b_max
/// are the uniform fixed points of the parameter-bounding systems built from
/// the rate extremes; sandwich_ok records whether b lies in [b_min, b_max]
/// componentwise within 1e-9 slack.
struct EquilibriumReport {
  State b;
  SolveMethod method = SolveMethod::newton;
  double residual = 0.0;
  State b_min;
  State b_max;
  bool sandwich_ok = false;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Exact balance level of the single-element reduction, (k1 - k2)/k3.
double fixed_point_1d(double k1, double k2, double k3);

/// Exact positive fixed point of the two-element reduction (each element fed
/// and suppressed by the other). kXY is rate family X of element Y.
State fixed_point_2d(double k11, double k12, double k21, double k22,
                     double k31, double k32);

/// Uniform estimate from the averaged rates, (mean k1 - mean k2)/mean k3.
/// Exact whenever each rate family is uniform.
double averaged_fixed_point(const SystemSpec& spec);

/// Per-element decoupled estimate (k1[i] - k2[i])/k3[i], floored at a small
/// positive value. Newton seed of last resort before continuation.
State componentwise_seed(const SystemSpec& spec);

/// Uniform systems built from the parameter extremes, (spec_max, spec_min):
/// spec_max uses (max k1, min k2, min k3) and bounds the fixed point from
/// above, spec_min uses (min k1, max k2, max k3) and bounds it from below.
std::pair<SystemSpec, SystemSpec> bounding_specs(const SystemSpec& spec);

struct NewtonOptions {
  double tolerance = 1e-12;   // residual max-norm target
  std::size_t max_iterations = 100;
  std::size_t max_halvings = 30;  // damping when the residual grows
  double positivity_floor = 1e-12;
};

/// Analytic Jacobian of the autonomous field at `state`. Row-major n*n.
std::vector<double> field_jacobian(const SystemSpec& spec, const State& state);

/// Damped Newton from an explicit seed. A solution that collapses toward the
/// origin (max component below 1e-9) is reported as non-converged: the zero
/// state is always a fixed point but never the positive equilibrium sought.
EquilibriumReport newton_fixed_point(const SystemSpec& spec, const State& seed,
                                     const NewtonOptions& options = {});

/// Newton with the default seeding chain: averaged estimate, then the
/// componentwise estimate, then continuation from the uniform averaged
/// system toward the target. Throws std::runtime_error if every stage fails.
EquilibriumReport newton_fixed_point(const SystemSpec& spec,
                                     const NewtonOptions& options = {});

/// Fixed point of the system augmented with the inputs active at time t
/// (constant forcing folded into the field). Used for the post-onset
/// baseline.
EquilibriumReport solve_forced_fixed_point(const SystemSpec& spec,
                                           const InputSchedule& schedule,
                                           double t, const State& seed);

struct BrouwerOptions {
  double eps = 0.01;          // map T(x) = x + eps * f(x)
  double tolerance = 1e-12;   // stop when the step max-norm drops below this
  std::size_t max_iterations = 1000000;
};

/// Self-map iteration x <- x + eps*f(x). Converges only where the map is
/// locally contractive; non-convergence is reported, not fatal.
EquilibriumReport brouwer_iterate(const SystemSpec& spec, const State& seed,
                                  const BrouwerOptions& options = {});

enum class HomotopyMode { joint, sequential };

/// One sample along the deformation between the bounding systems. The scale
/// factors blend each rate family from its upper-bounding extreme (s = 0)
/// to its lower-bounding extreme (s = 1):
///   k1(s1) = (1-s1)*max(k1) + s1*min(k1)
///   k2(s2) = (1-s2)*min(k2) + s2*max(k2)
///   k3(s3) = (1-s3)*min(k3) + s3*max(k3)
struct HomotopyPoint {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  State b;
  double residual = 0.0;
};

struct HomotopyPath {
  std::vector<HomotopyPoint> points;
  bool complete = false;
  std::optional<std::size_t> failure_index;
};

/// Tracks the fixed point from the upper bounding system (s = 0, level b_max)
/// to the lower one (s = 1, level b_min). joint mode sweeps s1 = s2 = s3
/// together in `steps` increments; sequential mode deforms k1 first, then k2,
/// then k3, `steps` increments per stage. Each point is Newton-solved seeded
/// by the previous point; a failure truncates the path.
HomotopyPath homotopy_path(const SystemSpec& spec, std::size_t steps,
                           HomotopyMode mode = HomotopyMode::joint);

/// Fills b_min / b_max / sandwich_ok on a report from the bounding systems.
/// Slack of 1e-9 absorbs round-off at the degenerate uniform case.
void attach_bounds(EquilibriumReport& report, const SystemSpec& spec);

}  // namespace symode
