#include <doctest.h>

#include <cmath>

#include "rtsec/period_opt.hpp"
#include "support/oracles.hpp"

using namespace rtsec;

namespace {

SecurityTask sec(std::string id, double c, double des, double max, double w = 1.0) {
  auto t = [](double u) { return Time::ticks(std::llround(u * kTicksPerUnit)); };
  return {std::move(id), t(c), t(des), t(max), w, std::nullopt, {}};
}

double units(const Rational& ticks) { return static_cast<double>(ticks) / kTicksPerUnit; }

}  // namespace

TEST_CASE("server utilization bound") {
  CHECK(server_util_bound(1, Time::units(5), Time::units(5)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(server_util_bound(2, Time::units(5), Time::units(5)) == doctest::Approx(2 * (std::sqrt(2.0) - 1)).epsilon(1e-12));
  CHECK(server_util_bound(1, Time::units(1), Time::units(2)) == doctest::Approx(0.25).epsilon(1e-12));
  // decreasing in n towards ln((3 - a)/(3 - 2a))
  double prev = 2.0;
  for (int n = 1; n <= 200; ++n) {
    const double b = server_util_bound(n, Time::units(3), Time::units(4));
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev == doctest::Approx(std::log(2.25 / 1.5)).epsilon(1e-3));
}

TEST_CASE("RM residual bound") {
  CHECK(rm_residual_bound(0, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rm_residual_bound(1, 1, 0.5) == doctest::Approx(2 * (std::sqrt(2.0) - 1) - 0.5).epsilon(1e-9));
  CHECK(std::abs(rm_residual_bound(5000, 5000, 0.2) - (std::log(2.0) - 0.2)) < 1e-3);
}

TEST_CASE("continuous knapsack examples") {
  PeriodProblem p;
  p.tasks = {sec("t1", 1, 10, 20), sec("t2", 2, 10, 40)};

  SUBCASE("large budget attains the desired periods") {
    p.utilization_budget = 1.0;
    auto r = adapt_periods(p);
    REQUIRE(r);
    CHECK(r.solution->periods.at("t1") == 10000);
    CHECK(r.solution->periods.at("t2") == 10000);
    CHECK(r.solution->tightness == 2);
  }
  SUBCASE("budget 0.25") {
    p.utilization_budget = 0.25;
    auto r = adapt_periods(p);
    REQUIRE(r);
    CHECK(units(r.solution->periods.at("t1")) == doctest::Approx(10.0));
    CHECK(units(r.solution->periods.at("t2")) == doctest::Approx(40.0 / 3.0).epsilon(1e-12));
    CHECK(static_cast<double>(r.solution->tightness) == doctest::Approx(1.75).epsilon(1e-12));
    const auto bf = oracle::brute_force_periods(p.tasks, 0.25, 0.0, 3000);
    CHECK(bf.best_eta <= 1.75 + 1e-9);
    CHECK(bf.best_eta >= 1.75 - 1e-3);
  }
  SUBCASE("budget below the lower-bound utilization") {
    p.utilization_budget = 0.09;
    CHECK_FALSE(adapt_periods(p));
  }
  SUBCASE("floor above a maximum period") {
    p.utilization_budget = 1.0;
    p.floor_period = Time::units(30);
    CHECK_FALSE(adapt_periods(p));
  }
  SUBCASE("floor raises the periods") {
    p.utilization_budget = 1.0;
    p.floor_period = Time::units(15);
    auto r = adapt_periods(p);
    REQUIRE(r);
    CHECK(r.solution->periods.at("t1") == 15000);
    CHECK(r.solution->periods.at("t2") == 15000);
  }
  SUBCASE("empty set") {
    p.tasks.clear();
    auto r = adapt_periods(p);
    REQUIRE(r);
    CHECK(r.solution->periods.empty());
    CHECK(r.solution->tightness == 0);
  }
}

TEST_CASE("RM-bound baseline") {
  TaskSet ts;
  ts.rt_tasks = {{"r", Time::units(1), Time::units(4), Time::units(4)}};
  ts.passive_security = {sec("p", 1, 10, 40)};
  ts.active_security = {sec("a", 1, 10, 40)};
  auto r = adapt_periods_rm_baseline(ts, Mode::Passive, 1);
  REQUIRE(r);
  CHECK(r.solution->periods.at("p") == 10000);

  TaskSet two = ts;
  two.rt_tasks.push_back({"r2", Time::units(1), Time::units(16), Time::units(16)});
  two.active_security = {sec("a", 1, 5, 40)};
  auto act = adapt_periods_rm_baseline(two, Mode::Active, 1);
  REQUIRE(act);
  CHECK(act.solution->periods.at("a") == 5000);  // floor 4 from the task above level 1
  two.passive_security = {sec("p", 1, 5, 40)};
  auto pas = adapt_periods_rm_baseline(two, Mode::Passive, 2);
  REQUIRE(pas);
  CHECK(pas.solution->periods.at("p") == 16000);  // floor is the largest RT period
}

TEST_CASE("knapsack optimum beats every grid point and stays feasible") {
  oracle::Gen g(41);
  for (int trial = 0; trial < 150; ++trial) {
    PeriodProblem p;
    const int n = g.integer(1, 3);
    double lower_util = 0.0, upper_util = 0.0;
    for (int i = 0; i < n; ++i) {
      const double des = g.integer(5, 100);
      const double mx = des * g.real(1.0, 5.0);
      const double c = std::max(0.001, std::round(des * g.real(0.01, 0.3) * 1000) / 1000);
      p.tasks.push_back(sec("t" + std::to_string(i), c, des, std::round(mx * 1000) / 1000, g.integer(1, 3)));
      lower_util += c / p.tasks.back().max_period.as_units();
      upper_util += c / des;
    }
    p.utilization_budget = g.real(lower_util * 0.9, upper_util * 1.1);
    const double floor_u = g.coin(0.3) ? g.real(0.0, 60.0) : 0.0;
    p.floor_period = Time::ticks(std::llround(floor_u * kTicksPerUnit));
    auto r = adapt_periods(p);
    const auto bf = oracle::brute_force_periods(p.tasks, p.utilization_budget, p.floor_period.as_units(), 60);
    if (!r) {
      CHECK(bf.best_eta < 0.0);
      continue;
    }
    const double eta = static_cast<double>(r.solution->tightness);
    CHECK(eta >= bf.best_eta - 1e-9);
    Rational util = 0;
    for (const auto& t : p.tasks) {
      const Rational T = r.solution->periods.at(t.id);
      CHECK(T >= Rational(std::max(t.desired_period, p.floor_period).count()));
      CHECK(T <= Rational(t.max_period.count()));
      util += Rational(t.wcet.count()) / T;
    }
    CHECK(util <= Rational(p.utilization_budget));
    // tick quantization keeps every bound
    const auto q = quantize(*r.solution);
    Rational qutil = 0;
    for (const auto& t : p.tasks) {
      CHECK(q.at(t.id) <= t.max_period);
      qutil += ratio(t.wcet, q.at(t.id));
    }
    CHECK(qutil <= Rational(p.utilization_budget));
  }
}

TEST_CASE("ties in the greedy ratio are broken by id") {
  PeriodProblem p;
  p.tasks = {sec("b", 1, 8, 16), sec("a", 1, 8, 16)};
  p.utilization_budget = 0.1875;  // 0.125 at T_max, room to raise one task fully
  auto r = adapt_periods(p);
  REQUIRE(r);
  CHECK(r.solution->periods.at("a") == 8000);
  CHECK(r.solution->periods.at("b") == 16000);
}

TEST_CASE("server-based adaptation uses UB and the 3P - 2Q floor") {
  std::vector<SecurityTask> tasks = {sec("s", 1, 10, 40)};
  auto r = adapt_periods_with_server(tasks, Time::units(2), Time::units(5));
  REQUIRE(r);
  CHECK(units(r.solution->periods.at("s")) >= 11.0);  // 3*5 - 2*2
  auto infeasible = adapt_periods_with_server(tasks, Time::units(1), Time::units(20));
  CHECK_FALSE(infeasible);  // floor 58 > T_max
}
