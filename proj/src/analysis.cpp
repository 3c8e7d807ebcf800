#include "rtsec/analysis.hpp"

#include <cassert>

namespace rtsec {

InterferenceContext make_context(std::span<const RealTimeTask> rt_sorted, int level,
                                 std::span<const SecurityTask> security,
                                 const PeriodMap& periods) {
  assert(level >= 0 && level <= static_cast<int>(rt_sorted.size()));
  InterferenceContext ctx;
  ctx.higher_rt.assign(rt_sorted.begin(), rt_sorted.begin() + level);
  ctx.lower_rt.assign(rt_sorted.begin() + level, rt_sorted.end());
  for (std::size_t i : security_rm_order(security, periods)) {
    const auto& t = security[i];
    auto it = periods.find(t.id);
    ctx.security.push_back({t.wcet, it == periods.end() ? t.desired_period : it->second});
    ctx.security_ids.push_back(t.id);
  }
  return ctx;
}

std::optional<Time> response_time(const RealTimeTask& task, std::span<const RealTimeTask> hp) {
  Time w = task.wcet;
  while (true) {
    if (w > task.deadline) return std::nullopt;
    Time next = task.wcet;
    for (const auto& h : hp) next += ceil_div(w, h.period) * h.wcet;
    if (next == w) return w;
    w = next;
  }
}

RtReport is_rt_schedulable(std::span<const RealTimeTask> rt_sorted) {
  RtReport report;
  for (std::size_t j = 0; j < rt_sorted.size(); ++j) {
    auto w = response_time(rt_sorted[j], rt_sorted.first(j));
    if (!w) report.schedulable = false;
    report.response_times.push_back(w);
  }
  return report;
}

Rational server_interference(Time P, std::span<const RealTimeTask> hp) {
  Rational delta = 0;
  for (const auto& h : hp) {
    delta += ratio(P, h.period) * h.wcet.count() + h.wcet.count();
  }
  return delta;
}

bool check_server_schedulable(Time Q, Time P, std::span<const RealTimeTask> hp) {
  return Q.exact() + server_interference(P, hp) <= P.exact();
}

Time security_workload(Demand task, std::span<const Demand> hp_sec) {
  Time load = task.wcet;
  for (const auto& h : hp_sec) load += ceil_div(task.period, h.period) * h.wcet;
  return load;
}

bool check_supply(Time Q, Time P, const Rational& delta, Time T_i, Time I_i) {
  // Multiply through by P > 0.
  const Rational bracket = (T_i - P + Q).exact() - delta;
  return Q.exact() * bracket >= I_i.exact() * P.count();
}

Time lp_rt_residual(const RealTimeTask& task, std::span<const RealTimeTask> hp) {
  Time demand = task.wcet;
  for (const auto& h : hp) demand += ceil_div(task.deadline, h.period) * h.wcet;
  return task.deadline - demand;
}

bool check_lp_rt(Time Q, Time P, const RealTimeTask& task, std::span<const RealTimeTask> hp) {
  // (D/P + 1) Q <= R  <=>  (D + P) Q <= R P, all integers.
  const Time residual = lp_rt_residual(task, hp);
  const auto lhs = static_cast<Wide>((task.deadline + P).count()) * Q.count();
  const auto rhs = static_cast<Wide>(residual.count()) * P.count();
  return lhs <= rhs;
}

}  // namespace rtsec
