#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rtsec/model.hpp"

namespace rtsec {

// Periodic demand of a task at a known period.
struct Demand {
  Time wcet;
  Time period;
};

// hp/lp split of the real-time tasks around a server placed at `level`, plus
// the security tasks in RM order (with their periods).
struct InterferenceContext {
  std::vector<RealTimeTask> higher_rt;
  std::vector<RealTimeTask> lower_rt;
  std::vector<Demand> security;  // RM order; security[0..i) is hp_S of security[i]
  std::vector<std::string> security_ids;
};

// `rt_sorted` must be in RM order. Level m (= rt_sorted.size()) puts every
// real-time task above the server.
InterferenceContext make_context(std::span<const RealTimeTask> rt_sorted, int level,
                                 std::span<const SecurityTask> security,
                                 const PeriodMap& periods);

// Least fixed point of w = C + sum ceil(w/T_h) C_h, starting at w = C.
// Returns nullopt (divergent) as soon as w exceeds the deadline.
std::optional<Time> response_time(const RealTimeTask& task, std::span<const RealTimeTask> hp);

struct RtReport {
  bool schedulable = true;
  std::vector<std::optional<Time>> response_times;  // same order as input
};

// `rt_sorted` must be in RM order.
RtReport is_rt_schedulable(std::span<const RealTimeTask> rt_sorted);

// Δ_S = sum over hp of (P/T_h + 1) C_h, in ticks.
Rational server_interference(Time P, std::span<const RealTimeTask> hp);

// Q + Δ_S(P) <= P.
bool check_server_schedulable(Time Q, Time P, std::span<const RealTimeTask> hp);

// I_i = C_i + sum over hp_S of ceil(T_i/T_h) C_h.
Time security_workload(Demand task, std::span<const Demand> hp_sec);

// (Q/P) [T_i - (P - Q) - Δ] >= I_i.
bool check_supply(Time Q, Time P, const Rational& delta, Time T_i, Time I_i);

// C_j + sum ceil(D_j/T_h) C_h + (D_j/P + 1) Q <= D_j.
bool check_lp_rt(Time Q, Time P, const RealTimeTask& task, std::span<const RealTimeTask> hp);

// Slack left for the server in check_lp_rt: D_j - C_j - sum ceil(D_j/T_h) C_h.
Time lp_rt_residual(const RealTimeTask& task, std::span<const RealTimeTask> hp);

}  // namespace rtsec
