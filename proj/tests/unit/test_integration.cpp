#include <doctest.h>

#include <cmath>

#include "rtsec/integration.hpp"
#include "rtsec/workload.hpp"
#include "support/oracles.hpp"

using namespace rtsec;

namespace {

SecurityTask sec(std::string id, double c, int des, int max, double w = 1.0) {
  return {std::move(id), Time::ticks(std::llround(c * kTicksPerUnit)), Time::units(des), Time::units(max), w,
          std::nullopt, {}};
}

}  // namespace

TEST_CASE("no real-time tasks attains the desired periods in both modes") {
  TaskSet ts;
  ts.passive_security = {sec("s", 1, 10, 40)};
  ts.active_security = {sec("s_a", 1, 10, 40)};
  ts.min_active_level = 0;
  auto r = select_parameters(normalize(ts));
  REQUIRE(r);
  CHECK(r.solution->passive_periods.at("s") == Time::units(10));
  CHECK(r.solution->active_periods.at("s_a") == Time::units(10));
  CHECK(r.solution->active_level == 0);
  CHECK(r.solution->passive_tightness == doctest::Approx(1.0));
  CHECK(r.solution->active_tightness == doctest::Approx(1.0));
  CHECK(verify_solution(ts, *r.solution).ok());
}

TEST_CASE("a saturated real-time task leaves no room for a server") {
  TaskSet ts;
  ts.rt_tasks = {{"r", Time::ticks(7900), Time::units(8), Time::units(8)}};
  ts.passive_security = {sec("s", 1, 100, 400)};
  ts.active_security = {sec("a", 1, 100, 400)};
  auto r = select_parameters(normalize(ts));
  CHECK_FALSE(r);
  REQUIRE(r.failure);
  CHECK(r.failure->branch == FailedBranch::Passive);
  CHECK_FALSE(r.failure->hint.empty());
}

TEST_CASE("an unschedulable real-time set is reported before any search") {
  TaskSet ts;
  ts.rt_tasks = {{"a", Time::units(4), Time::units(8), Time::units(8)},
                 {"b", Time::units(5), Time::units(8), Time::units(8)}};
  ts.passive_security = {sec("s", 1, 100, 400)};
  ts.active_security = {sec("t", 1, 100, 400)};
  auto r = select_parameters(normalize(ts));
  REQUIRE(r.failure);
  CHECK(r.failure->branch == FailedBranch::RtBaseline);
  CHECK(r.failure->reason.find("b") != std::string::npos);
  CHECK(r.levels.empty());
}

TEST_CASE("tightness") {
  std::vector<SecurityTask> v = {sec("a", 1, 10, 40, 2), sec("b", 1, 20, 40, 3)};
  CHECK(tightness(v, {{"a", Time::units(10)}, {"b", Time::units(20)}}) == doctest::Approx(5.0));
  std::vector<SecurityTask> one = {sec("a", 1, 10, 40, 2)};
  CHECK(tightness(one, {{"a", Time::units(20)}}) == doctest::Approx(1.0));
  CHECK(tightness({}, {}) == 0.0);
  CHECK_THROWS_AS(tightness(one, {}), Error);
}

TEST_CASE("effectiveness") {
  std::vector<double> des = {10, 10}, mx = {20, 40};
  CHECK(effectiveness_xi(des, des, mx) == doctest::Approx(1.0));
  CHECK(effectiveness_xi(mx, des, mx) == doctest::Approx(0.0));
  std::vector<double> solved = {10, 13.33};
  CHECK(effectiveness_xi(solved, des, mx) == doctest::Approx(1.0 - 3.33 / std::sqrt(1000.0)).epsilon(1e-12));
  CHECK(effectiveness_xi(solved, des, mx) == doctest::Approx(0.8947).epsilon(1e-4));
  CHECK_THROWS_AS(effectiveness_xi(des, des, des), Error);
  CHECK_THROWS_AS(effectiveness_xi(std::vector<double>{}, {}, {}), Error);
  CHECK_THROWS_AS(effectiveness_xi(std::vector<double>{1}, des, mx), Error);
}

TEST_CASE("ACTIVE tightness dominates PASSIVE when the sets are equal") {
  int solved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.n_rt = 2 + static_cast<int>(seed % 5);
    spec.rt_util_target = 0.1 + 0.05 * static_cast<double>(seed % 8);
    spec.mirror_active = true;
    const auto ts = generate(spec);
    auto r = select_parameters(ts);
    if (!r.passive.feasible) continue;
    // the level-m candidate solves the PASSIVE problem on an equal set
    REQUIRE(r.active.feasible);
    ++solved;
    CHECK(r.active.tightness >= r.passive.tightness - 1e-12);
    REQUIRE(r.solution);
    const auto m = compute_metrics(ts, *r.solution);
    CHECK(m.eta_diff >= -1e-12);
    CHECK(m.xi_passive >= 0.0);
    CHECK(m.xi_passive <= 1.0);
    CHECK(verify_solution(ts, *r.solution).ok());
  }
  CHECK(solved > 50);
}

TEST_CASE("level ties prefer the larger level") {
  // No real-time interference from below: every level admits the same periods.
  TaskSet ts;
  ts.rt_tasks = {{"a", Time::units(1), Time::units(100), Time::units(100)},
                 {"b", Time::units(1), Time::units(200), Time::units(200)}};
  ts.passive_security = {sec("p", 1, 1000, 4000)};
  ts.active_security = {sec("q", 1, 1000, 4000)};
  auto r = select_parameters(normalize(ts));
  REQUIRE(r);
  REQUIRE(r.levels.size() == 2);
  if (r.levels[0].branch.tightness == r.levels[1].branch.tightness) CHECK(r.solution->active_level == 2);
}

TEST_CASE("verification catches a tampered solution") {
  GenSpec spec;
  spec.seed = 4;
  spec.rt_util_target = 0.2;
  const auto ts = generate(spec);
  auto r = select_parameters(ts);
  REQUIRE(r);
  auto bad = *r.solution;
  bad.passive_server.capacity = bad.passive_server.replenish_period;
  CHECK_FALSE(verify_solution(ts, bad).ok());
  auto below = *r.solution;
  below.active_periods.begin()->second = Time::ticks(1);
  CHECK_FALSE(verify_solution(ts, below).ok());
}

TEST_CASE("selection is deterministic") {
  GenSpec spec;
  spec.seed = 77;
  const auto ts = generate(spec);
  auto a = select_parameters(ts);
  auto b = select_parameters(ts);
  REQUIRE(a.solution.has_value() == b.solution.has_value());
  if (a) {
    CHECK(a.solution->passive_server == b.solution->passive_server);
    CHECK(a.solution->active_server == b.solution->active_server);
    CHECK(a.solution->passive_periods == b.solution->passive_periods);
    CHECK(a.solution->active_periods == b.solution->active_periods);
  }
}
