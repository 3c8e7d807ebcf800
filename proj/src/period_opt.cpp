#include "rtsec/period_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtsec {

double server_util_bound(int n, Time Q, Time P) {
  const double alpha = Q.as_units() / P.as_units();
  const double base = (3.0 - alpha) / (3.0 - 2.0 * alpha);
  return n * std::expm1(std::log(base) / n);
}

double rm_residual_bound(int m, int n, double rt_util) {
  const int k = m + n;
  if (k == 0) return 1.0 - rt_util;
  return k * std::expm1(std::log(2.0) / k) - rt_util;
}

PeriodResult adapt_periods(const PeriodProblem& problem) {
  PeriodResult result;
  const auto& tasks = problem.tasks;
  if (tasks.empty()) {
    result.solution = PeriodSolution{{}, 0};
    return result;
  }
  if (!(problem.utilization_budget > 0.0)) {
    result.reason = "utilization budget is not positive";
    return result;
  }

  const std::size_t n = tasks.size();
  std::vector<Rational> x_lo(n), x_hi(n), x(n);
  Rational used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = tasks[i];
    const Time lower = std::max(t.desired_period, problem.floor_period);
    if (lower > t.max_period) {
      result.reason = "floor period " + problem.floor_period.to_string() + " exceeds max_period of " + t.id;
      return result;
    }
    x_lo[i] = Rational(1, t.max_period.count());
    x_hi[i] = Rational(1, lower.count());
    x[i] = x_lo[i];
    used += x_lo[i] * t.wcet.count();
  }
  const Rational budget(problem.utilization_budget);
  if (used > budget) {
    result.reason = "utilization at maximum periods exceeds the budget";
    return result;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    // w_a Tdes_a / C_a  >  w_b Tdes_b / C_b
    const Rational ra = Rational(tasks[a].weight) * tasks[a].desired_period.count() * tasks[b].wcet.count();
    const Rational rb = Rational(tasks[b].weight) * tasks[b].desired_period.count() * tasks[a].wcet.count();
    if (ra != rb) return ra > rb;
    return tasks[a].id < tasks[b].id;
  });

  Rational remaining = budget - used;
  for (std::size_t i : order) {
    if (remaining == 0) break;
    const Rational cost = (x_hi[i] - x_lo[i]) * tasks[i].wcet.count();
    if (cost <= remaining) {
      x[i] = x_hi[i];
      remaining -= cost;
    } else {
      x[i] = x_lo[i] + remaining / tasks[i].wcet.count();
      remaining = 0;
    }
  }

  PeriodSolution sol{{}, 0};
  for (std::size_t i = 0; i < n; ++i) {
    sol.periods[tasks[i].id] = 1 / x[i];
    sol.tightness += Rational(tasks[i].weight) * tasks[i].desired_period.count() * x[i];
  }
  result.solution = std::move(sol);
  return result;
}

PeriodResult adapt_periods_rm_baseline(const TaskSet& ts, Mode mode, int level,
                                       ActiveRtCounting counting) {
  const auto& tasks = ts.security(mode);
  const int m = ts.rt_count();
  const int above = mode == Mode::Passive ? m : std::clamp(level, 0, m);

  PeriodProblem problem;
  problem.tasks = tasks;
  for (int j = 0; j < above; ++j)
    problem.floor_period = std::max(problem.floor_period, ts.rt_tasks[j].period);

  if (mode == Mode::Active && counting == ActiveRtCounting::HigherThanLevel) {
    double u = 0.0;
    for (int j = 0; j < above; ++j) u += ts.rt_tasks[j].utilization();
    problem.utilization_budget = rm_residual_bound(above, static_cast<int>(tasks.size()), u);
  } else {
    problem.utilization_budget =
        rm_residual_bound(m, static_cast<int>(tasks.size()), ts.rt_utilization());
  }
  return adapt_periods(problem);
}

PeriodResult adapt_periods_with_server(std::span<const SecurityTask> tasks, Time Q, Time P) {
  PeriodProblem problem;
  problem.tasks.assign(tasks.begin(), tasks.end());
  problem.utilization_budget = server_util_bound(static_cast<int>(tasks.size()), Q, P);
  problem.floor_period = 3 * P - 2 * Q;
  return adapt_periods(problem);
}

PeriodMap quantize(const PeriodSolution& solution) {
  PeriodMap out;
  for (const auto& [id, period] : solution.periods) out[id] = Time::ceil(period);
  return out;
}

}  // namespace rtsec
