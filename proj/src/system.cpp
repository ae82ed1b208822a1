#include "symode/system.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace symode {

SystemSpec SystemSpec::uniform(std::size_t n, double k1, double k2, double k3,
                               int gen_offset, int sup_offset) {
  SystemSpec spec;
  spec.n = n;
  spec.gen_offset = gen_offset;
  spec.sup_offset = sup_offset;
  spec.k1.assign(n, k1);
  spec.k2.assign(n, k2);
  spec.k3.assign(n, k3);
  return spec;
}

std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

bool ValidationReport::ok() const {
  for (const auto& issue : issues) {
    if (issue.severity == ValidationIssue::Severity::error) return false;
  }
  return true;
}

bool ValidationReport::clean() const { return issues.empty(); }

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << (issue.severity == ValidationIssue::Severity::error ? "error: "
                                                               : "warning: ")
        << issue.message << '\n';
  }
  return out.str();
}

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_rates(ValidationReport& report, const std::vector<double>& k,
                 const char* name, std::size_t n) {
  if (k.size() != n) {
    report.issues.push_back(
        {ValidationIssue::Severity::error,
         std::string(name) + " has " + std::to_string(k.size()) +
             " entries, expected " + std::to_string(n)});
    return;
  }
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] > 0.0) || !std::isfinite(k[i])) {
      report.issues.push_back(
          {ValidationIssue::Severity::error,
           std::string(name) + "[" + std::to_string(i + 1) +
               "] must be positive and finite, got " + std::to_string(k[i])});
    }
  }
}

}  // namespace

ValidationReport validate(const SystemSpec& spec) {
  ValidationReport report;
  if (spec.n == 0) {
    report.issues.push_back(
        {ValidationIssue::Severity::error, "system size n must be positive"});
    return report;
  }
  check_rates(report, spec.k1, "k1", spec.n);
  check_rates(report, spec.k2, "k2", spec.n);
  check_rates(report, spec.k3, "k3", spec.n);
  if (!report.ok()) return report;

  // Offset degeneracy: for n >= 3 the two loops must target distinct
  // non-self neighbors or the cyclic structure collapses. The n = 1 and
  // n = 2 reductions alias offsets by construction, so only warn there.
  const auto severity = spec.n >= 3 ? ValidationIssue::Severity::error
                                    : ValidationIssue::Severity::warning;
  const std::size_t g = wrap_index(spec.gen_offset, spec.n);
  const std::size_t s = wrap_index(spec.sup_offset, spec.n);
  if (g == 0) {
    report.issues.push_back(
        {severity, "gen_offset wraps to self-coupling (offset " +
                       std::to_string(spec.gen_offset) + " mod " +
                       std::to_string(spec.n) + " = 0)"});
  }
  if (s == 0) {
    report.issues.push_back(
        {severity, "sup_offset wraps to self-coupling (offset " +
                       std::to_string(spec.sup_offset) + " mod " +
                       std::to_string(spec.n) + " = 0)"});
  }
  if (g == s && g != 0) {
    report.issues.push_back(
        {severity, "gen_offset and sup_offset wrap to the same neighbor"});
  }

  const double m1 = mean(spec.k1);
  const double m2 = mean(spec.k2);
  if (!(m1 > m2)) {
    report.issues.push_back(
        {ValidationIssue::Severity::error,
         "mean(k1) = " + std::to_string(m1) + " must exceed mean(k2) = " +
             std::to_string(m2) + " for a positive equilibrium to exist"});
  } else {
    for (std::size_t i = 0; i < spec.n; ++i) {
      if (spec.k1[i] <= spec.k2[i]) {
        report.issues.push_back(
            {ValidationIssue::Severity::warning,
             "k1[" + std::to_string(i + 1) + "] <= k2[" + std::to_string(i + 1) +
                 "]; element " + std::to_string(i + 1) +
                 " decays in isolation"});
      }
    }
  }
  return report;
}

void require_valid(const SystemSpec& spec) {
  const auto report = validate(spec);
  if (!report.ok()) {
    throw std::invalid_argument("invalid system spec:\n" + report.to_string());
  }
}

State vector_field(const SystemSpec& spec, const State& state) {
  if (state.size() != spec.n) {
    throw std::invalid_argument("state dimension does not match spec.n");
  }
  State out(spec.n);
  vector_field_into(spec, state, out);
  return out;
}

void vector_field_into(const SystemSpec& spec, const State& state, State& out) {
  const std::size_t n = spec.n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.gen_offset, n);
    const std::size_t s = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.sup_offset, n);
    out[i] = spec.k1[i] * state[g] - spec.k2[i] * state[i] -
             spec.k3[i] * state[i] * state[s];
  }
}

FieldDecomposition decompose_field(const SystemSpec& spec, const State& b,
                                   const State& state) {
  if (b.size() != spec.n || state.size() != spec.n) {
    throw std::invalid_argument("state dimension does not match spec.n");
  }
  const std::size_t n = spec.n;
  FieldDecomposition parts;
  parts.f_of_b.resize(n);
  parts.l_of_d.resize(n);
  parts.q_of_d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.gen_offset, n);
    const std::size_t s = wrap_index(static_cast<std::ptrdiff_t>(i) + spec.sup_offset, n);
    const double di = state[i] - b[i];
    const double dg = state[g] - b[g];
    const double ds = state[s] - b[s];
    parts.f_of_b[i] =
        spec.k1[i] * b[g] - spec.k2[i] * b[i] - spec.k3[i] * b[i] * b[s];
    parts.l_of_d[i] = spec.k1[i] * dg - spec.k2[i] * di -
                      spec.k3[i] * (di * b[s] + b[i] * ds);
    parts.q_of_d[i] = -spec.k3[i] * di * ds;
  }
  return parts;
}

}  // namespace symode
