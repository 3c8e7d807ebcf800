#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsec/model.hpp"

namespace rtsec {

// n [((3 - Q/P) / (3 - 2Q/P))^(1/n) - 1], the utilization bound for n tasks
// served by a (Q, P) server when every period is at least 3P - 2Q.
double server_util_bound(int n, Time Q, Time P);

// (m + n)(2^(1/(m+n)) - 1) - rt_util; 1 - rt_util is returned when m + n == 0.
double rm_residual_bound(int m, int n, double rt_util);

struct PeriodProblem {
  std::vector<SecurityTask> tasks;
  double utilization_budget = 0.0;
  Time floor_period;  // uniform lower bound on every period
};

struct PeriodSolution {
  std::map<std::string, Rational> periods;  // exact, in ticks
  Rational tightness;                       // sum of w_i T_des / T_i
};

struct PeriodResult {
  std::optional<PeriodSolution> solution;
  std::string reason;

  explicit operator bool() const { return solution.has_value(); }
};

// Maximizes sum w_i T_des/T_i subject to sum C_i/T_i <= budget and
// max(T_des, floor) <= T_i <= T_max. With x_i = 1/T_i the problem is a
// continuous knapsack; tasks are raised greedily by w_i T_des / C_i (ties by
// id) and the marginal task is set fractionally. The budget is taken as the
// exact value of the double.
PeriodResult adapt_periods(const PeriodProblem& problem);

// Which real-time tasks the ACTIVE RM baseline counts in its bound.
enum class ActiveRtCounting { AllRealTime, HigherThanLevel };

// RM-bound baseline without a server. PASSIVE: floor is the largest RT
// period and the bound counts all m RT tasks. ACTIVE: floor is the largest
// period among RT tasks above `level`.
PeriodResult adapt_periods_rm_baseline(const TaskSet& ts, Mode mode, int level,
                                       ActiveRtCounting counting = ActiveRtCounting::AllRealTime);

// Server-based period adaptation: budget UB(n, Q, P), floor 3P - 2Q.
PeriodResult adapt_periods_with_server(std::span<const SecurityTask> tasks, Time Q, Time P);

// Rounds each exact period up to a whole tick. Rounding up keeps every
// utilization constraint satisfied and cannot cross T_max.
PeriodMap quantize(const PeriodSolution& solution);

}  // namespace rtsec
