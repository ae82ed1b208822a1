#include "symode/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symode {

namespace {

constexpr double kOriginThreshold = 1e-9;
constexpr double kSandwichSlack = 1e-9;

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double max_norm(const State& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_component(const State& v) {
  return *std::max_element(v.begin(), v.end());
}

// Residual of the autonomous field plus an optional constant forcing vector.
void residual_into(const SystemSpec& spec, const State& state,
                   const State* forcing, State& out) {
  vector_field_into(spec, state, out);
  if (forcing) {
    for (std::size_t i = 0; i < spec.n; ++i) out[i] += (*forcing)[i];
  }
}

/// In-place Gaussian elimination with partial pivoting on a row-major n*n
/// matrix. Returns false when the pivot collapses. System sizes here are
/// single digits, so dense elimination is the right tool.
bool solve_linear(std::vector<double>& a, State& rhs, std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double mag = std::abs(a[row * n + col]);
      if (mag > best) {
        best = mag;
        pivot = row;
      }
    }
    if (!(best > 1e-300)) return false;
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j) {
        std::swap(a[col * n + j], a[pivot * n + j]);
      }
      std::swap(rhs[col], rhs[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row * n + col] * inv;
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) {
        a[row * n + j] -= factor * a[col * n + j];
      }
      rhs[row] -= factor * rhs[col];
    }
  }
  for (std::size_t row = n; row-- > 0;) {
    double sum = rhs[row];
    for (std::size_t j = row + 1; j < n; ++j) sum -= a[row * n + j] * rhs[j];
    rhs[row] = sum / a[row * n + row];
  }
  return true;
}

EquilibriumReport newton_core(const SystemSpec& spec, const State& seed,
                              const NewtonOptions& options,
                              const State* forcing) {
  const std::size_t n = spec.n;
  EquilibriumReport report;
  report.method = SolveMethod::newton;
  report.b = seed;
  for (double& x : report.b) x = std::max(x, options.positivity_floor);

  State residual(n);
  residual_into(spec, report.b, forcing, residual);
  double res_norm = max_norm(residual);

  State candidate(n), cand_residual(n);
  std::vector<double> jac;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    if (res_norm <= options.tolerance) break;
    jac = field_jacobian(spec, report.b);
    State delta = residual;
    for (double& x : delta) x = -x;
    if (!solve_linear(jac, delta, n)) {
      report.residual = res_norm;
      report.converged = false;
      attach_bounds(report, spec);
      return report;
    }
    // Backtracking: halve the step while the residual grows, then accept the
    // last candidate regardless so plateaus cannot stall the iteration.
    double lambda = 1.0;
    double cand_norm = res_norm;
    for (std::size_t h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t i = 0; i < n; ++i) {
        candidate[i] =
            std::max(report.b[i] + lambda * delta[i], options.positivity_floor);
      }
      residual_into(spec, candidate, forcing, cand_residual);
      cand_norm = max_norm(cand_residual);
      if (std::isfinite(cand_norm) && cand_norm < res_norm) break;
      lambda *= 0.5;
    }
    report.b = candidate;
    residual = cand_residual;
    res_norm = cand_norm;
    report.iterations = iter + 1;
    if (!std::isfinite(res_norm)) break;
  }

  report.residual = res_norm;
  report.converged = std::isfinite(res_norm) && res_norm <= options.tolerance;
  // The zero state solves the unforced system identically; a root hugging the
  // origin is not the positive equilibrium and counts as a failure.
  const bool forced = forcing && max_norm(*forcing) > 0.0;
  if (report.converged && !forced && max_component(report.b) < kOriginThreshold) {
    report.converged = false;
  }
  attach_bounds(report, spec);
  return report;
}

// Deformation used only by the default seeding chain: pull every rate toward
// its family mean, whose uniform system has a known exact fixed point.
SystemSpec averaged_blend(const SystemSpec& target, double s) {
  const double m1 = mean(target.k1);
  const double m2 = mean(target.k2);
  const double m3 = mean(target.k3);
  SystemSpec spec = target;
  for (std::size_t i = 0; i < target.n; ++i) {
    spec.k1[i] = (1.0 - s) * m1 + s * target.k1[i];
    spec.k2[i] = (1.0 - s) * m2 + s * target.k2[i];
    spec.k3[i] = (1.0 - s) * m3 + s * target.k3[i];
  }
  return spec;
}

}  // namespace

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::analytic_1d: return "analytic-1d";
    case SolveMethod::analytic_2d: return "analytic-2d";
    case SolveMethod::averaged_approx: return "averaged-approx";
    case SolveMethod::newton: return "newton";
    case SolveMethod::brouwer_iteration: return "brouwer-iteration";
    case SolveMethod::homotopy: return "homotopy";
  }
  return "unknown";
}

double fixed_point_1d(double k1, double k2, double k3) {
  if (!(k3 > 0.0)) throw std::invalid_argument("fixed_point_1d needs k3 > 0");
  return (k1 - k2) / k3;
}

State fixed_point_2d(double k11, double k12, double k21, double k22,
                     double k31, double k32) {
  const double num = k11 * k12 - k21 * k22;
  const double den1 = k12 * k31 + k21 * k32;
  const double den2 = k11 * k32 + k22 * k31;
  if (den1 == 0.0 || den2 == 0.0) {
    throw std::invalid_argument("fixed_point_2d denominator vanishes");
  }
  return {num / den1, num / den2};
}

double averaged_fixed_point(const SystemSpec& spec) {
  return (mean(spec.k1) - mean(spec.k2)) / mean(spec.k3);
}

State componentwise_seed(const SystemSpec& spec) {
  State seed(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    seed[i] = std::max((spec.k1[i] - spec.k2[i]) / spec.k3[i], 1e-3);
  }
  return seed;
}

std::pair<SystemSpec, SystemSpec> bounding_specs(const SystemSpec& spec) {
  const auto [k1_min, k1_max] = std::minmax_element(spec.k1.begin(), spec.k1.end());
  const auto [k2_min, k2_max] = std::minmax_element(spec.k2.begin(), spec.k2.end());
  const auto [k3_min, k3_max] = std::minmax_element(spec.k3.begin(), spec.k3.end());
  auto spec_max = SystemSpec::uniform(spec.n, *k1_max, *k2_min, *k3_min,
                                      spec.gen_offset, spec.sup_offset);
  auto spec_min = SystemSpec::uniform(spec.n, *k1_min, *k2_max, *k3_max,
                                      spec.gen_offset, spec.sup_offset);
  return {std::move(spec_max), std::move(spec_min)};
}

std::vector<double> field_jacobian(const SystemSpec& spec, const State& state) {
  const std::size_t n = spec.n;
  std::vector<double> jac(n * n, 0.0);
  // Additive assembly keeps degenerate offsets (g == i, s == i, g == s)
  // correct without special cases.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.gen_offset, n);
    const std::size_t s = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.sup_offset, n);
    jac[i * n + g] += spec.k1[i];
    jac[i * n + i] += -spec.k2[i] - spec.k3[i] * state[s];
    jac[i * n + s] += -spec.k3[i] * state[i];
  }
  return jac;
}

EquilibriumReport newton_fixed_point(const SystemSpec& spec, const State& seed,
                                     const NewtonOptions& options) {
  if (seed.size() != spec.n) {
    throw std::invalid_argument("newton seed size does not match system");
  }
  return newton_core(spec, seed, options, nullptr);
}

EquilibriumReport newton_fixed_point(const SystemSpec& spec,
                                     const NewtonOptions& options) {
  const State averaged(spec.n, std::max(averaged_fixed_point(spec), 1e-3));
  auto report = newton_core(spec, averaged, options, nullptr);
  if (report.converged) return report;

  report = newton_core(spec, componentwise_seed(spec), options, nullptr);
  if (report.converged) return report;

  // Last resort: walk in from the uniform averaged system, whose fixed point
  // is known exactly, deforming all three rate families together.
  constexpr std::size_t kChainSteps = 64;
  State b(spec.n, std::max(averaged_fixed_point(spec), 1e-3));
  bool chain_ok = true;
  for (std::size_t j = 1; j <= kChainSteps; ++j) {
    const double s = static_cast<double>(j) / kChainSteps;
    const auto stage = newton_core(averaged_blend(spec, s), b, options, nullptr);
    if (!stage.converged) {
      chain_ok = false;
      break;
    }
    b = stage.b;
  }
  if (chain_ok) {
    report = newton_core(spec, b, options, nullptr);
    if (report.converged) return report;
  }
  throw std::runtime_error(
      "newton failed to locate a positive fixed point from the averaged seed, "
      "the componentwise seed, and continuation");
}

EquilibriumReport solve_forced_fixed_point(const SystemSpec& spec,
                                           const InputSchedule& schedule,
                                           double t, const State& seed) {
  State forcing(spec.n, 0.0);
  for (const auto& input : schedule) {
    if (input.active_at(t)) forcing[input.element] += input.amplitude;
  }
  return newton_core(spec, seed, NewtonOptions{}, &forcing);
}

EquilibriumReport brouwer_iterate(const SystemSpec& spec, const State& seed,
                                  const BrouwerOptions& options) {
  EquilibriumReport report;
  report.method = SolveMethod::brouwer_iteration;
  report.b = seed;
  State field(spec.n);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    vector_field_into(spec, report.b, field);
    const double step = options.eps * max_norm(field);
    if (!std::isfinite(step)) break;
    if (step <= options.tolerance) {
      report.converged = true;
      break;
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
      report.b[i] += options.eps * field[i];
    }
    report.iterations = iter + 1;
  }
  vector_field_into(spec, report.b, field);
  report.residual = max_norm(field);
  if (!std::isfinite(report.residual)) report.converged = false;
  attach_bounds(report, spec);
  return report;
}

HomotopyPath homotopy_path(const SystemSpec& spec, std::size_t steps,
                           HomotopyMode mode) {
  if (steps < 2) throw std::invalid_argument("homotopy needs steps >= 2");
  const auto [upper, lower] = bounding_specs(spec);

  const auto blend_at = [&](double s1, double s2, double s3) {
    SystemSpec stage = spec;
    for (std::size_t i = 0; i < spec.n; ++i) {
      stage.k1[i] = (1.0 - s1) * upper.k1[i] + s1 * lower.k1[i];
      stage.k2[i] = (1.0 - s2) * upper.k2[i] + s2 * lower.k2[i];
      stage.k3[i] = (1.0 - s3) * upper.k3[i] + s3 * lower.k3[i];
    }
    return stage;
  };

  std::vector<std::array<double, 3>> knots;
  knots.push_back({0.0, 0.0, 0.0});
  if (mode == HomotopyMode::joint) {
    for (std::size_t j = 1; j <= steps; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(steps);
      knots.push_back({s, s, s});
    }
  } else {
    for (std::size_t j = 1; j <= steps; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(steps);
      knots.push_back({s, 0.0, 0.0});
    }
    for (std::size_t j = 1; j <= steps; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(steps);
      knots.push_back({1.0, s, 0.0});
    }
    for (std::size_t j = 1; j <= steps; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(steps);
      knots.push_back({1.0, 1.0, s});
    }
  }

  HomotopyPath path;
  State b(spec.n, fixed_point_1d(upper.k1[0], upper.k2[0], upper.k3[0]));
  {
    HomotopyPoint start;
    start.b = b;
    start.residual = max_norm(vector_field(upper, b));
    path.points.push_back(std::move(start));
  }
  for (std::size_t j = 1; j < knots.size(); ++j) {
    const auto [s1, s2, s3] = knots[j];
    const auto report = newton_fixed_point(blend_at(s1, s2, s3), b);
    if (!report.converged) {
      path.failure_index = j;
      return path;
    }
    b = report.b;
    HomotopyPoint point;
    point.s1 = s1;
    point.s2 = s2;
    point.s3 = s3;
    point.b = b;
    point.residual = report.residual;
    path.points.push_back(std::move(point));
  }
  path.complete = true;
  return path;
}

void attach_bounds(EquilibriumReport& report, const SystemSpec& spec) {
  const auto [upper, lower] = bounding_specs(spec);
  const double hi = (upper.k1[0] - upper.k2[0]) / upper.k3[0];
  const double lo = (lower.k1[0] - lower.k2[0]) / lower.k3[0];
  report.b_max.assign(spec.n, hi);
  report.b_min.assign(spec.n, lo);
  report.sandwich_ok = true;
  for (std::size_t i = 0; i < report.b.size() && i < spec.n; ++i) {
    if (report.b[i] < lo - kSandwichSlack || report.b[i] > hi + kSandwichSlack) {
      report.sandwich_ok = false;
      break;
    }
  }
}

}  // namespace symode
