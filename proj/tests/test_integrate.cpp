#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "symode/integrate.hpp"
#include "symode/system.hpp"

using namespace symode;

namespace {

const SystemSpec kLogistic = SystemSpec::uniform(1, 1.0, 0.5, 0.5);

// Exact solution of dE/dt = 0.5 E (1 - E) from E(0) = e0.
double logistic_exact(double e0, double t) {
  return 1.0 / (1.0 + (1.0 - e0) / e0 * std::exp(-0.5 * t));
}

std::size_t index_of_time(const Trajectory& traj, double t) {
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] == t) return i;
  }
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("augmented field adds only the inputs active at t") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const State ones(5, 1.0);
  const InputSchedule schedule{{0, 10.0, 20.0, 1.5}};

  const auto before = augmented_field(spec, ones, schedule, 5.0);
  const auto base = vector_field(spec, ones);
  CHECK(before == base);

  const auto at_start = augmented_field(spec, ones, schedule, 10.0);
  CHECK(at_start[0] == base[0] + 1.5);
  for (std::size_t i = 1; i < 5; ++i) CHECK(at_start[i] == base[i]);

  const auto at_stop = augmented_field(spec, ones, schedule, 20.0);
  CHECK(at_stop == base);
}

TEST_CASE("open ended and stacked inputs accumulate") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const State ones(5, 1.0);
  const InputSchedule schedule{{2, 1.0, std::nullopt, 0.25},
                               {2, 3.0, std::nullopt, -0.75}};
  const auto f = augmented_field(spec, ones, schedule, 1e9);
  CHECK(f[2] == doctest::Approx(0.25 - 0.75).epsilon(1e-15));
  CHECK(augmented_field(spec, ones, schedule, 2.0)[2] == 0.25);
  CHECK(augmented_field(spec, ones, schedule, 0.5)[2] == 0.0);
}

TEST_CASE("one rk4 step tracks the logistic solution to fifth order") {
  const State next = step_rk4(kLogistic, {0.5}, {}, 0.0, 0.01);
  CHECK(std::abs(next[0] - logistic_exact(0.5, 0.01)) < 1e-10);
}

TEST_CASE("halving the step shrinks the one step error about 32x") {
  const double coarse =
      std::abs(step_rk4(kLogistic, {0.5}, {}, 0.0, 0.4)[0] -
               logistic_exact(0.5, 0.4));
  const double fine =
      std::abs(step_rk4(kLogistic, {0.5}, {}, 0.0, 0.2)[0] -
               logistic_exact(0.5, 0.2));
  REQUIRE(fine > 0.0);
  const double ratio = coarse / fine;
  CHECK(ratio > 20.0);
  CHECK(ratio < 48.0);
}

TEST_CASE("a balance state is a fixed point of the stepper") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.16, 0.5);
  const State b(5, (1.0 - 0.16) / 0.5);
  const auto next = step_rk4(spec, b, {}, 0.0, 0.01);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(next[i] - b[i]) <= 1e-12);
}

TEST_CASE("non-finite intermediate states raise instead of propagating") {
  CHECK_THROWS_AS((void)step_rk4(kLogistic, {1e200}, {}, 0.0, 0.01),
                  std::runtime_error);
}

TEST_CASE("simulate records t = 0 and lands exactly on t_end") {
  const auto traj = simulate(kLogistic, {0.5}, {0.01, 30.0, 10});
  REQUIRE(traj.size() >= 2);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 30.0);
  CHECK(traj.states.front()[0] == 0.5);
  CHECK_FALSE(traj.diverged());
  CHECK_FALSE(traj.first_nonpositive_time.has_value());
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK(traj.times[i] > traj.times[i - 1]);
  }
  // 3000 whole steps, every 10th recorded, plus the initial sample.
  CHECK(traj.size() == 301);
  CHECK(std::abs(traj.states.back()[0] - 1.0) < 1e-6);
}

TEST_CASE("a partial final step is taken when t_end is off the grid") {
  const auto traj = simulate(kLogistic, {0.5}, {0.01, 1.005, 10});
  REQUIRE(traj.size() >= 2);
  CHECK(traj.times.back() == 1.005);
  CHECK(traj.times[traj.size() - 2] == 1.0);
  CHECK(std::abs(traj.states.back()[0] - logistic_exact(0.5, 1.005)) < 1e-10);
}

TEST_CASE("record_stride thins samples but keeps both endpoints") {
  const auto every = simulate(kLogistic, {0.5}, {0.01, 1.0, 1});
  CHECK(every.size() == 101);
  const auto sparse = simulate(kLogistic, {0.5}, {0.01, 1.0, 1000});
  REQUIRE(sparse.size() == 2);
  CHECK(sparse.times.front() == 0.0);
  CHECK(sparse.times.back() == 1.0);
  CHECK(sparse.states.back()[0] == every.states.back()[0]);
}

TEST_CASE("global error over a long window is fourth order") {
  double worst_coarse = 0.0;
  double worst_fine = 0.0;
  const auto coarse = simulate(kLogistic, {0.5}, {0.01, 20.0, 1});
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    worst_coarse = std::max(
        worst_coarse,
        std::abs(coarse.states[i][0] - logistic_exact(0.5, coarse.times[i])));
  }
  const auto fine = simulate(kLogistic, {0.5}, {0.005, 20.0, 2});
  for (std::size_t i = 0; i < fine.size(); ++i) {
    worst_fine = std::max(
        worst_fine,
        std::abs(fine.states[i][0] - logistic_exact(0.5, fine.times[i])));
  }
  CHECK(worst_coarse < 1e-8);
  REQUIRE(worst_fine > 0.0);
  const double ratio = worst_coarse / worst_fine;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("negative initial crosses the guard and is reported in band") {
  const auto traj = simulate(kLogistic, {-0.1}, {0.01, 30.0, 10});
  CHECK(traj.diverged());
  REQUIRE(traj.blowup_time.has_value());
  CHECK(*traj.blowup_time > 1.0);
  CHECK(*traj.blowup_time < 10.0);
  REQUIRE(traj.first_nonpositive_time.has_value());
  CHECK(*traj.first_nonpositive_time == 0.0);
  CHECK(traj.times.back() < 30.0);
  for (const auto& state : traj.states) CHECK(std::isfinite(state[0]));
}

TEST_CASE("a zero initial state is inert and flagged, not fatal") {
  const auto traj = simulate(kLogistic, {0.0}, {0.01, 5.0, 10});
  CHECK_FALSE(traj.diverged());
  REQUIRE(traj.first_nonpositive_time.has_value());
  CHECK(*traj.first_nonpositive_time == 0.0);
  CHECK(traj.states.back()[0] == 0.0);
}

TEST_CASE("identical runs are bit identical") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.16, 0.5);
  State initial(5, 1.68);
  initial[0] += 5.0;
  const auto a = simulate(spec, initial, {0.01, 50.0, 10});
  const auto b = simulate(spec, initial, {0.01, 50.0, 10});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.times[i] == b.times[i]);
    CHECK(a.states[i] == b.states[i]);
  }
}

TEST_CASE("autonomous flow is invariant under time shifts") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const State initial{2.0, 1.0, 1.0, 1.0, 1.0};
  const auto full = simulate(spec, initial, {0.01, 20.0, 10});
  const std::size_t offset = index_of_time(full, 5.0);
  const auto shifted = simulate(spec, full.states[offset], {0.01, 15.0, 10});
  double worst = 0.0;
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    for (std::size_t e = 0; e < 5; ++e) {
      worst = std::max(
          worst, std::abs(shifted.states[i][e] - full.states[i + offset][e]));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("scheduled input bends the trajectory only after onset") {
  const auto spec = SystemSpec::uniform(5, 1.0, 0.5, 0.5);
  const State b(5, 1.0);
  const InputSchedule schedule{{0, 5.0, std::nullopt, 0.5}};
  const auto traj = simulate(spec, b, {0.01, 10.0, 10}, schedule);
  const std::size_t at5 = index_of_time(traj, 5.0);
  for (std::size_t i = 0; i < at5; ++i) {
    CHECK(traj.states[i] == b);  // exact fixed point before onset
  }
  // The step landing on t_start already samples the input at its k4 stage.
  CHECK(traj.states[at5][0] > 1.0);
  CHECK(traj.states.back()[0] > 1.05);
}

TEST_CASE("simulate validates its inputs") {
  CHECK_THROWS_AS((void)simulate(kLogistic, {0.5, 0.5}, {0.01, 1.0, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(kLogistic, {0.5}, {0.0, 1.0, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(kLogistic, {0.5}, {-0.01, 1.0, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(kLogistic, {0.5}, {0.5, 0.25, 10}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)simulate(kLogistic, {0.5}, {0.01, 1.0, 10}, {{3, 0.0, 1.0, 0.1}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)simulate(kLogistic, {0.5}, {0.01, 1.0, 10}, {{0, 2.0, 1.0, 0.1}}),
      std::invalid_argument);
}
