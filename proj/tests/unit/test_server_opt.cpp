#include <doctest.h>

#include "rtsec/server_opt.hpp"
#include "support/oracles.hpp"

using namespace rtsec;

namespace {

RealTimeTask rt(std::string id, double c, int t) {
  return {std::move(id), Time::ticks(static_cast<std::int64_t>(c * kTicksPerUnit)), Time::units(t), Time::units(t)};
}

SecurityTask sec(std::string id, double c, int des, int max = 0) {
  return {std::move(id), Time::ticks(static_cast<std::int64_t>(c * kTicksPerUnit)), Time::units(des),
          Time::units(max ? max : 4 * des), 1.0, std::nullopt, {}};
}

TaskSet make(std::vector<RealTimeTask> rts, std::vector<SecurityTask> s, int l_s = 1) {
  TaskSet ts;
  ts.rt_tasks = std::move(rts);
  ts.passive_security = s;
  for (auto& t : s) t.id = "a_" + t.id;
  ts.active_security = s;
  ts.min_active_level = ts.rt_tasks.empty() ? 0 : l_s;
  return normalize(ts);
}

double bandwidth(const ServerParams& p) { return p.capacity.as_units() / p.replenish_period.as_units(); }

oracle::ServerOracleInput oracle_input(const TaskSet& ts, int level, Mode mode) {
  oracle::ServerOracleInput in;
  in.hp.assign(ts.rt_tasks.begin(), ts.rt_tasks.begin() + level);
  in.lp.assign(ts.rt_tasks.begin() + level, ts.rt_tasks.end());
  const auto& s = ts.security(mode);
  for (std::size_t i : security_rm_order(s, desired_periods(s)))
    in.security.push_back({s[i].wcet.as_units(), s[i].desired_period.as_units()});
  return in;
}

}  // namespace

TEST_CASE("no real-time tasks gives a full-capacity server") {
  auto ts = make({}, {sec("s", 1, 10)});
  auto r = select_passive_params(ts, desired_periods(ts.passive_security));
  REQUIRE(r);
  CHECK(r.params->capacity == r.params->replenish_period);
  CHECK(r.params->level == 0);
}

TEST_CASE("server bound Q <= P/2 - 4 under a (4, 8) task") {
  auto ts = make({rt("h", 4, 8)}, {sec("s", 1, 10)});
  ServerProblem problem(make_context(ts.rt_tasks, 1, ts.passive_security, desired_periods(ts.passive_security)));
  // Eq3 alone: the best capacity per P is floor(P/2 - 4); P <= 8 is infeasible
  for (int p : {6, 8}) {
    auto e = problem.evaluate(Time::units(p));
    CHECK_FALSE(e.feasible);
    CHECK(e.violated == Constraint::ServerSchedulability);
  }
  // With T_des = 10 the supply bracket 6 - 1.5P + Q <= 2 - P is negative for
  // P > 8, so the full problem is infeasible, in agreement with the dense grid.
  auto r = select_passive_params(ts, desired_periods(ts.passive_security), {Time::units(60), 200, 3, false});
  CHECK_FALSE(r);
  CHECK(oracle::dense_server_grid(oracle_input(ts, 1, Mode::Passive), 60, 2000, 400).best_ratio == 0.0);

  // A long desired period makes it feasible and Q/P approaches (P/2 - 4)/P.
  auto relaxed = make({rt("h", 4, 8)}, {sec("s", 1, 400)});
  auto r2 = select_passive_params(relaxed, desired_periods(relaxed.passive_security));
  REQUIRE(r2);
  const double P = r2.params->replenish_period.as_units();
  CHECK(r2.params->capacity.as_units() <= P / 2 - 4 + 1e-9);
  CHECK(bandwidth(*r2.params) == doctest::Approx((P / 2 - 4) / P).epsilon(1e-3));
  const auto ref = oracle::dense_server_grid(oracle_input(relaxed, 1, Mode::Passive), 400, 2000, 2000);
  CHECK(bandwidth(*r2.params) >= ref.best_ratio - ServerSearchConfig{}.tolerance());
}

TEST_CASE("near-saturated real-time load leaves no server") {
  auto ts = make({rt("h", 7, 8)}, {sec("s", 2, 10)});
  auto r = select_passive_params(ts, desired_periods(ts.passive_security), {Time::units(56), 200, 3, true});
  CHECK_FALSE(r);
  CHECK_FALSE(r.regions.empty());
  CHECK(oracle::dense_server_grid(oracle_input(ts, 1, Mode::Passive), 56, 2000, 400).best_ratio == 0.0);
}

TEST_CASE("ACTIVE at level m coincides with PASSIVE") {
  auto ts = make({rt("a", 1, 4), rt("b", 2, 10)}, {sec("s", 1, 40)}, 1);
  auto passive = select_passive_params(ts, desired_periods(ts.passive_security));
  auto active = select_active_params(ts, 2, desired_periods(ts.active_security));
  REQUIRE(passive);
  REQUIRE(active);
  CHECK(passive.params->capacity == active.params->capacity);
  CHECK(passive.params->replenish_period == active.params->replenish_period);
  CHECK(active.params->mode == Mode::Active);
  CHECK_THROWS_AS(select_active_params(ts, 0, desired_periods(ts.active_security)), Error);
  CHECK_THROWS_AS(select_active_params(ts, 3, desired_periods(ts.active_security)), Error);
}

TEST_CASE("ACTIVE level 1 respects the low-priority deadline") {
  auto ts = make({rt("a", 1, 4), rt("b", 2, 10)}, {sec("s", 1, 12)}, 1);
  auto r = select_active_params(ts, 1, desired_periods(ts.active_security));
  REQUIRE(r);
  const double Q = r.params->capacity.as_units();
  const double P = r.params->replenish_period.as_units();
  CHECK((10.0 / P + 1.0) * Q <= 5.0 + 1e-12);
  CHECK(check_lp_rt(r.params->capacity, r.params->replenish_period, ts.rt_tasks[1],
                    std::span<const RealTimeTask>(ts.rt_tasks).first(1)));
  const auto ref = oracle::dense_server_grid(oracle_input(ts, 1, Mode::Active), 12, 2000, 2000);
  CHECK(ref.best_ratio > 0.0);
  CHECK(bandwidth(*r.params) >= ref.best_ratio - ServerSearchConfig{}.tolerance());
}

TEST_CASE("empty security set") {
  auto ts = make({rt("a", 1, 4)}, {});
  auto r = select_active_params(ts, 1, {});
  CHECK_FALSE(r);
  CHECK(r.reason == "empty security set");
}

TEST_CASE("parallel scan equals serial scan") {
  oracle::Gen g(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto rts = oracle::small_rt_set(g, g.integer(1, 5), g.real(0.1, 0.6));
    std::vector<SecurityTask> s;
    for (int i = 0; i < g.integer(1, 3); ++i) s.push_back(sec("s" + std::to_string(i), g.integer(1, 4), g.integer(20, 200)));
    auto ts = make(rts, s, 1);
    const int level = g.integer(1, ts.rt_count());
    ServerProblem problem(make_context(ts.rt_tasks, level, ts.active_security, desired_periods(ts.active_security)));
    std::vector<Time> ps;
    for (int k = 1; k <= 500; ++k) ps.push_back(Time::ticks(k * 97));
    const auto a = scan_serial(problem, ps);
    const auto b = scan_parallel(problem, ps);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].period == b[i].period);
      CHECK(a[i].capacity == b[i].capacity);
      CHECK(a[i].feasible == b[i].feasible);
      CHECK(a[i].violated == b[i].violated);
      CHECK(a[i].subject == b[i].subject);
    }
    ServerSearchConfig serial_cfg;
    serial_cfg.parallel = false;
    auto rs = search_server(problem, serial_cfg);
    auto rp = search_server(problem, ServerSearchConfig{});
    CHECK(rs.params.has_value() == rp.params.has_value());
    if (rs && rp) CHECK(*rs.params == *rp.params);
  }
}

TEST_CASE("the closed-form capacity is the largest feasible tick") {
  oracle::Gen g(23);
  int feasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto rts = oracle::small_rt_set(g, g.integer(1, 4), g.real(0.1, 0.5));
    std::vector<SecurityTask> s = {sec("s", g.integer(1, 3), g.integer(40, 300))};
    auto ts = make(rts, s, 1);
    const int level = g.integer(1, ts.rt_count());
    auto ctx = make_context(ts.rt_tasks, level, ts.active_security, desired_periods(ts.active_security));
    ServerProblem problem(ctx);
    const Time P = Time::ticks(g.integer(500, 40000));
    const auto e = problem.evaluate(P);
    if (!e.feasible) continue;
    ++feasible;
    auto all_ok = [&](Time Q) {
      if (Q > P || !check_server_schedulable(Q, P, ctx.higher_rt)) return false;
      for (std::size_t j = 0; j < ctx.lower_rt.size(); ++j) {
        std::vector<RealTimeTask> hp(ctx.higher_rt);
        hp.insert(hp.end(), ctx.lower_rt.begin(), ctx.lower_rt.begin() + static_cast<long>(j));
        if (!check_lp_rt(Q, P, ctx.lower_rt[j], hp)) return false;
      }
      const Rational delta = server_interference(P, ctx.higher_rt);
      return check_supply(Q, P, delta, ctx.security[0].period, security_workload(ctx.security[0], {}));
    };
    CHECK(all_ok(e.capacity));
    CHECK_FALSE(all_ok(e.capacity + Time::ticks(1)));
  }
  CHECK(feasible > 20);
}

TEST_CASE("search result is within tolerance of a 10x denser 2-D grid") {
  oracle::Gen g(29);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto rts = oracle::small_rt_set(g, g.integer(1, 4), g.real(0.1, 0.5));
    std::vector<SecurityTask> s;
    for (int i = 0; i < g.integer(1, 3); ++i) s.push_back(sec("s" + std::to_string(i), g.integer(1, 3), g.integer(40, 300)));
    auto ts = make(rts, s, 1);
    const int level = g.integer(1, ts.rt_count());
    ServerSearchConfig cfg;
    cfg.grid_steps = 100;
    auto r = select_active_params(ts, level, desired_periods(ts.active_security), cfg);
    double p_max = 1e18;
    for (const auto& t : ts.active_security) p_max = std::min(p_max, t.desired_period.as_units());
    const auto ref = oracle::dense_server_grid(oracle_input(ts, level, Mode::Active), p_max, 1000, 1000);
    if (!r) {
      CHECK(ref.best_ratio <= cfg.tolerance());
      continue;
    }
    ++compared;
    CHECK(oracle::oracle_feasible(oracle_input(ts, level, Mode::Active), r.params->capacity.as_units(),
                                  r.params->replenish_period.as_units()));
    CHECK(bandwidth(*r.params) >= ref.best_ratio - cfg.tolerance());
  }
  CHECK(compared > 10);
}
