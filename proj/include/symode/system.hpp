#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace symode {

/// Element magnitudes of an n-element system. For n = 5 the canonical
/// ordering is (J, S, M, H, T).
using State = std::vector<double>;

/// Cyclic system definition: each element i obeys
///
///   dE[i]/dt = k1[i]*E[i+gen_offset] - k2[i]*E[i] - k3[i]*E[i]*E[i+sup_offset]
///
/// with all indices wrapped modulo n. The generative loop feeds each element
/// from the neighbor at gen_offset; the suppressive loop couples it bilinearly
/// to the neighbor at sup_offset. All rates are strictly positive.
struct SystemSpec {
  std::size_t n = 0;
  int gen_offset = -1;
  int sup_offset = -2;
  std::vector<double> k1;  // generative gains
  std::vector<double> k2;  // self-decay rates
  std::vector<double> k3;  // suppressive coupling rates

  static SystemSpec uniform(std::size_t n, double k1, double k2, double k3,
                            int gen_offset = -1, int sup_offset = -2);

  bool operator==(const SystemSpec&) const = default;
};

/// Wraps a signed index into [0, n). Handles any offset magnitude.
std::size_t wrap_index(std::ptrdiff_t i, std::size_t n);

struct ValidationIssue {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;     // no error-level issues
  bool clean() const;  // no issues at all
  std::string to_string() const;
};

/// Report-style check of every SystemSpec invariant: positive parameters,
/// matching vector lengths, the positive-fixed-point condition
/// mean(k1) > mean(k2), and offset degeneracy. Offset degeneracies are
/// warnings for n <= 2 (the 1- and 2-element reductions are legitimately
/// degenerate) and errors for n >= 3. An elementwise k1 <= k2 with a passing
/// mean is a warning only.
ValidationReport validate(const SystemSpec& spec);

/// Throws std::invalid_argument when validate() finds error-level issues.
void require_valid(const SystemSpec& spec);

/// Evaluates the time derivative of every element.
State vector_field(const SystemSpec& spec, const State& state);

/// Allocation-free form for integrator loops. out must have size n.
void vector_field_into(const SystemSpec& spec, const State& state, State& out);

/// The field at b + d split into the equilibrium residual, the terms linear
/// in the deviation d, and the terms quadratic in d. The three parts sum to
/// vector_field(spec, b + d); f_of_b vanishes when b is an exact fixed point.
struct FieldDecomposition {
  State f_of_b;
  State l_of_d;
  State q_of_d;
};

FieldDecomposition decompose_field(const SystemSpec& spec, const State& b,
                                   const State& state);

}  // namespace symode
