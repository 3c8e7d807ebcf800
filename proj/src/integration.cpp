#include "rtsec/integration.hpp"

#include <cmath>

#include "rtsec/analysis.hpp"
#include "rtsec/period_opt.hpp"

namespace rtsec {

const char* to_string(FailedBranch b) {
  switch (b) {
    case FailedBranch::RtBaseline: return "rt_baseline";
    case FailedBranch::Passive: return "passive";
    case FailedBranch::Active: return "active";
  }
  return "?";
}

namespace {

constexpr const char* kHint =
    "reduce the number or WCET of security tasks, enlarge their desired/maximum periods, "
    "or relax real-time task parameters if permissible";

BranchResult finish_branch(std::span<const SecurityTask> tasks, const ServerSearchResult& server) {
  BranchResult out;
  if (!server) {
    out.reason = "server selection: " + server.reason;
    return out;
  }
  out.server = *server.params;
  const auto periods = adapt_periods_with_server(tasks, out.server.capacity, out.server.replenish_period);
  if (!periods) {
    out.reason = "period adaptation: " + periods.reason;
    return out;
  }
  out.periods = quantize(*periods.solution);
  out.tightness = tightness(tasks, out.periods);
  out.feasible = true;
  return out;
}

}  // namespace

BranchResult solve_passive(const TaskSet& ts, const ServerSearchConfig& cfg) {
  const auto& tasks = ts.passive_security;
  return finish_branch(tasks, select_passive_params(ts, desired_periods(tasks), cfg));
}

BranchResult solve_active_level(const TaskSet& ts, int level, const ServerSearchConfig& cfg) {
  const auto& tasks = ts.active_security;
  return finish_branch(tasks, select_active_params(ts, level, desired_periods(tasks), cfg));
}

IntegrationResult select_parameters(const TaskSet& ts, const ServerSearchConfig& cfg) {
  if (auto v = validate_task_set(ts); !v.empty())
    throw ValidationError("invalid task set: " + v.front().subject + ": " + v.front().message);

  IntegrationResult result;
  const auto rt = is_rt_schedulable(ts.rt_tasks);
  if (!rt.schedulable) {
    std::string who;
    for (std::size_t j = 0; j < rt.response_times.size(); ++j)
      if (!rt.response_times[j]) { who = ts.rt_tasks[j].id; break; }
    result.failure = Unschedulable{FailedBranch::RtBaseline,
                                   "real-time task " + who + " misses its deadline without security tasks",
                                   "the legacy task set must be schedulable on its own"};
    result.passive.reason = result.active.reason = "real-time task set unschedulable";
    return result;
  }

  result.passive = solve_passive(ts, cfg);

  const int m = ts.rt_count();
  int best = -1;
  for (int level = ts.min_active_level; level <= m; ++level) {
    result.levels.push_back({level, solve_active_level(ts, level, cfg)});
    const auto& b = result.levels.back().branch;
    if (b.feasible && (best < 0 || b.tightness >= result.levels[best].branch.tightness))
      best = static_cast<int>(result.levels.size()) - 1;
  }
  if (best >= 0) {
    result.active = result.levels[best].branch;
  } else {
    result.active.reason = result.levels.empty() ? "no ACTIVE level to try"
                                                 : result.levels.back().branch.reason;
  }

  if (!result.passive.feasible) {
    result.failure = Unschedulable{FailedBranch::Passive, result.passive.reason, kHint};
  } else if (!result.active.feasible) {
    result.failure = Unschedulable{FailedBranch::Active, result.active.reason, kHint};
  } else {
    IntegrationSolution sol;
    sol.passive_server = result.passive.server;
    sol.passive_periods = result.passive.periods;
    sol.passive_tightness = result.passive.tightness;
    sol.active_server = result.active.server;
    sol.active_periods = result.active.periods;
    sol.active_tightness = result.active.tightness;
    sol.active_level = result.active.server.level;
    result.solution = std::move(sol);
  }
  return result;
}

double tightness(std::span<const SecurityTask> tasks, const PeriodMap& periods) {
  double eta = 0.0;
  for (const auto& t : tasks) {
    auto it = periods.find(t.id);
    if (it == periods.end()) throw Error("no solved period for security task " + t.id);
    eta += t.weight * t.desired_period.as_units() / it->second.as_units();
  }
  return eta;
}

double effectiveness_xi(std::span<const double> solved, std::span<const double> desired,
                        std::span<const double> maximum) {
  if (solved.empty() || solved.size() != desired.size() || solved.size() != maximum.size())
    throw Error("effectiveness_xi: vectors must be non-empty and of equal length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < solved.size(); ++i) {
    num += (solved[i] - desired[i]) * (solved[i] - desired[i]);
    den += (maximum[i] - desired[i]) * (maximum[i] - desired[i]);
  }
  if (den == 0.0) throw Error("degenerate bounds");
  return 1.0 - std::sqrt(num) / std::sqrt(den);
}

MetricsReport compute_metrics(const TaskSet& ts, const IntegrationSolution& sol) {
  MetricsReport r;
  r.eta_passive = tightness(ts.passive_security, sol.passive_periods);
  r.eta_active = tightness(ts.active_security, sol.active_periods);
  r.eta_diff = r.eta_active - r.eta_passive;

  auto xi_for = [&](Mode mode) {
    std::vector<double> solved, desired, maximum;
    bool spread = false;
    for (const auto& t : ts.security(mode)) {
      const Time p = sol.periods(mode).at(t.id);
      solved.push_back(p.as_units());
      desired.push_back(t.desired_period.as_units());
      maximum.push_back(t.max_period.as_units());
      spread = spread || t.max_period != t.desired_period;
      r.per_task_tightness[t.id] = t.desired_period.as_units() / p.as_units();
    }
    return spread ? effectiveness_xi(solved, desired, maximum) : 1.0;
  };
  r.xi_passive = xi_for(Mode::Passive);
  r.xi_active = xi_for(Mode::Active);
  return r;
}

SolutionCheck verify_solution(const TaskSet& ts, const IntegrationSolution& sol) {
  SolutionCheck out;
  const int m = ts.rt_count();
  auto error = [&](std::string s) { out.errors.push_back(std::move(s)); };

  if (sol.passive_server.level != m) error("PASSIVE server level must be m");
  if (sol.active_level < ts.min_active_level || sol.active_level > m)
    error("ACTIVE level outside [l_S, m]");
  if (sol.active_server.level != sol.active_level) error("ACTIVE server level differs from l*");

  for (Mode mode : {Mode::Passive, Mode::Active}) {
    const std::string tag = to_string(mode);
    const auto& tasks = ts.security(mode);
    const auto& server = sol.server(mode);
    const auto& periods = sol.periods(mode);
    const Time Q = server.capacity;
    const Time P = server.replenish_period;
    if (Q <= Time{} || Q > P) {
      error(tag + ": server requires 0 < Q <= P");
      continue;
    }
    const int level = server.level;
    if (level < 0 || level > m) continue;

    Rational util = 0;
    for (const auto& t : tasks) {
      auto it = periods.find(t.id);
      if (it == periods.end()) {
        error(tag + ": missing period for " + t.id);
        continue;
      }
      if (it->second < t.desired_period || it->second > t.max_period)
        error(tag + ": period of " + t.id + " outside [T_des, T_max]");
      if (it->second < 3 * P - 2 * Q) error(tag + ": period of " + t.id + " below 3P - 2Q");
      util += ratio(t.wcet, it->second);
    }
    if (periods.size() != tasks.size()) error(tag + ": period map does not match the task set");
    if (!tasks.empty() && util > Rational(server_util_bound(static_cast<int>(tasks.size()), Q, P)))
      error(tag + ": security utilization exceeds the server bound");

    const auto ctx_des = make_context(ts.rt_tasks, level, tasks, desired_periods(tasks));
    if (!check_server_schedulable(Q, P, ctx_des.higher_rt)) error(tag + ": server not schedulable");
    const Rational delta = server_interference(P, ctx_des.higher_rt);
    const std::span<const Demand> sec(ctx_des.security);
    for (std::size_t i = 0; i < sec.size(); ++i) {
      if (!check_supply(Q, P, delta, sec[i].period, security_workload(sec[i], sec.first(i))))
        error(tag + ": insufficient supply for " + ctx_des.security_ids[i] + " at T_des");
    }
    const auto ctx_sol = make_context(ts.rt_tasks, level, tasks, periods);
    const std::span<const Demand> sol_sec(ctx_sol.security);
    for (std::size_t i = 0; i < sol_sec.size(); ++i) {
      if (!check_supply(Q, P, delta, sol_sec[i].period, security_workload(sol_sec[i], sol_sec.first(i))))
        out.warnings.push_back(tag + ": supply check fails for " + ctx_sol.security_ids[i] +
                               " at its solved period");
    }
    for (int j = level; j < m; ++j) {
      const std::span<const RealTimeTask> hp(ts.rt_tasks.data(), static_cast<std::size_t>(j));
      if (!check_lp_rt(Q, P, ts.rt_tasks[j], hp))
        error(tag + ": low-priority task " + ts.rt_tasks[j].id + " not schedulable");
    }
  }
  if (out.errors.empty()) {
    if (std::abs(tightness(ts.passive_security, sol.passive_periods) - sol.passive_tightness) > 1e-9 ||
        std::abs(tightness(ts.active_security, sol.active_periods) - sol.active_tightness) > 1e-9)
      error("reported tightness does not match the periods");
  }
  return out;
}

}  // namespace rtsec
