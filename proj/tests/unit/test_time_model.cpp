#include <doctest.h>

#include <algorithm>

#include "rtsec/model.hpp"
#include "support/oracles.hpp"

using namespace rtsec;

namespace {

RealTimeTask rt(std::string id, int c, int t) { return {std::move(id), Time::units(c), Time::units(t), Time::units(t)}; }

SecurityTask sec(std::string id, int c, int des, int max, double w = 1.0) {
  return {std::move(id), Time::units(c), Time::units(des), Time::units(max), w, std::nullopt, {}};
}

}  // namespace

TEST_CASE("time parsing keeps exact ticks") {
  CHECK(Time::parse("12").count() == 12000);
  CHECK(Time::parse("7.9").count() == 7900);
  CHECK(Time::parse("0.125").count() == 125);
  CHECK(Time::parse(".5").count() == 500);
  CHECK(Time::parse("3.500").count() == 3500);
  CHECK_THROWS_AS(Time::parse("0.0001"), ParseError);
  CHECK_THROWS_AS(Time::parse("-1"), ParseError);
  CHECK_THROWS_AS(Time::parse("1e3"), ParseError);
  CHECK_THROWS_AS(Time::parse(""), ParseError);
  CHECK_THROWS_AS(Time::parse("."), ParseError);
}

TEST_CASE("time printing round-trips") {
  for (const char* s : {"0", "1", "13.334", "7.9", "0.001", "100.05"}) CHECK(Time::parse(s).to_string() == s);
  oracle::Gen g(7);
  for (int k = 0; k < 1000; ++k) {
    const Time t = Time::ticks(g.integer(0, 10'000'000));
    CHECK(Time::parse(t.to_string()) == t);
  }
}

TEST_CASE("rational rounding to ticks") {
  CHECK(Time::ceil(Rational(40000, 3)).count() == 13334);
  CHECK(Time::floor(Rational(40000, 3)).count() == 13333);
  CHECK(Time::ceil(Rational(5)).count() == 5);
  CHECK(Time::floor(Rational(-1, 2)).count() == -1);
  CHECK(ceil_div(Time::units(10), Time::units(4)) == 3);
  CHECK(ceil_div(Time::units(8), Time::units(4)) == 2);
}

TEST_CASE("rate-monotonic priorities") {
  SUBCASE("strict period order") {
    std::vector<RealTimeTask> v = {rt("slow", 2, 10), rt("fast", 1, 4)};
    auto r = assign_rm_priorities(v);
    CHECK(r[0].task.id == "fast");
    CHECK(r[0].priority == 0);
    CHECK(r[1].task.id == "slow");
    CHECK(r[1].priority == 1);
  }
  SUBCASE("equal periods break ties by id") {
    std::vector<RealTimeTask> v = {rt("b", 1, 5), rt("a", 1, 5)};
    auto r = assign_rm_priorities(v);
    CHECK(r[0].task.id == "a");
    CHECK(r[1].task.id == "b");
  }
  SUBCASE("empty and duplicate input") {
    CHECK_THROWS_AS(assign_rm_priorities({}), ValidationError);
    std::vector<RealTimeTask> v = {rt("a", 1, 5), rt("a", 1, 6)};
    CHECK_THROWS_AS(assign_rm_priorities(v), ValidationError);
  }
}

TEST_CASE("rate-monotonic assignment is a permutation independent of input order") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto v = oracle::small_rt_set(g, g.integer(1, 8), 0.5);
    const auto ref = assign_rm_priorities(v);
    std::shuffle(v.begin(), v.end(), g.rng);
    const auto again = assign_rm_priorities(v);
    REQUIRE(ref.size() == v.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(ref[i].priority == static_cast<int>(i));
      CHECK(ref[i].task.id == again[i].task.id);
      if (i > 0) CHECK(ref[i - 1].task.period <= ref[i].task.period);
    }
  }
}

TEST_CASE("validation reports every violation") {
  TaskSet ts;
  ts.rt_tasks = {rt("r0", 1, 4), rt("r1", 2, 10)};
  ts.passive_security = {sec("s0", 1, 10, 40)};
  ts.active_security = {sec("s1", 1, 10, 40)};
  ts.min_active_level = 1;
  CHECK(validate_task_set(ts).empty());

  SUBCASE("inverted security bounds name the task") {
    ts.passive_security[0].desired_period = Time::units(50);
    auto v = validate_task_set(ts);
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject.find("s0") != std::string::npos);
  }
  SUBCASE("l_S = 0") {
    ts.min_active_level = 0;
    auto v = validate_task_set(ts);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message == "min_active_level out of range");
  }
  SUBCASE("l_S above m") {
    ts.min_active_level = 3;
    CHECK(validate_task_set(ts).size() == 1);
  }
  SUBCASE("several problems at once") {
    ts.rt_tasks[0].wcet = Time::units(5);         // C > D
    ts.active_security[0].id = "s0";              // duplicate across sets
    ts.active_security[0].weight = 0.0;           // non-positive weight
    ts.passive_security[0].solved_period = Time::units(50);  // above T_max
    CHECK(validate_task_set(ts).size() == 4);
  }
  SUBCASE("deadline above period") {
    ts.rt_tasks[1].deadline = Time::units(11);
    CHECK(validate_task_set(ts).size() == 1);
  }
  SUBCASE("rt tasks out of RM order") {
    std::swap(ts.rt_tasks[0], ts.rt_tasks[1]);
    CHECK(validate_task_set(ts).size() == 1);
    CHECK(normalize(ts).rt_tasks[0].id == "r0");
  }
  SUBCASE("no real-time tasks requires l_S = 0") {
    ts.rt_tasks.clear();
    CHECK(validate_task_set(ts).size() == 1);
    ts.min_active_level = 0;
    CHECK(validate_task_set(ts).empty());
  }
}

TEST_CASE("validation is sound on random sets") {
  oracle::Gen g(5);
  for (int trial = 0; trial < 300; ++trial) {
    TaskSet ts;
    const int m = g.integer(0, 5);
    for (int j = 0; j < m; ++j) {
      const int T = g.integer(1, 20);
      ts.rt_tasks.push_back({"r" + std::to_string(j), Time::units(g.integer(0, 22)), Time::units(T),
                             Time::units(g.integer(1, 22))});
    }
    for (int i = 0; i < g.integer(0, 3); ++i)
      ts.passive_security.push_back(sec("p" + std::to_string(i), g.integer(0, 12), g.integer(1, 12),
                                        g.integer(1, 12), g.real(-0.5, 2.0)));
    ts.min_active_level = g.integer(-1, 6);
    ts.rt_tasks = [&] {
      auto v = ts.rt_tasks;
      std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.period < b.period || (a.period == b.period && a.id < b.id); });
      return v;
    }();
    if (!validate_task_set(ts).empty()) continue;
    for (const auto& t : ts.rt_tasks) {
      CHECK(t.wcet > Time{});
      CHECK(t.wcet <= t.deadline);
      CHECK(t.deadline <= t.period);
    }
    for (const auto& t : ts.passive_security) {
      CHECK(t.wcet > Time{});
      CHECK(t.wcet <= t.desired_period);
      CHECK(t.desired_period <= t.max_period);
      CHECK(t.weight > 0.0);
    }
    if (m > 0) CHECK((ts.min_active_level > 0 && ts.min_active_level <= m));
  }
}

TEST_CASE("security RM order uses solved periods with id ties") {
  std::vector<SecurityTask> v = {sec("b", 1, 10, 40), sec("a", 1, 20, 40), sec("c", 1, 10, 40)};
  PeriodMap p = {{"a", Time::units(12)}, {"b", Time::units(30)}};
  auto order = security_rm_order(v, p);
  CHECK(v[order[0]].id == "c");  // 10 (desired, missing from map)
  CHECK(v[order[1]].id == "a");  // 12
  CHECK(v[order[2]].id == "b");  // 30
}
