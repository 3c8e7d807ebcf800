#include "rtsec/server_opt.hpp"

#include <algorithm>

namespace rtsec {

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::None: return "none";
    case Constraint::ServerSchedulability: return "server schedulability";
    case Constraint::SecuritySupply: return "security supply";
    case Constraint::LowPriorityRt: return "low-priority real-time deadline";
  }
  return "?";
}

ServerProblem::ServerProblem(InterferenceContext ctx) : ctx_(std::move(ctx)) {
  hp_utilization_ = 0;
  for (const auto& h : ctx_.higher_rt) {
    hp_wcet_sum_ += h.wcet;
    hp_utilization_ += ratio(h.wcet, h.period);
  }
  const auto& rt_all = ctx_.higher_rt;
  for (std::size_t j = 0; j < ctx_.lower_rt.size(); ++j) {
    // hp of a low-priority task: every task above the server plus the
    // low-priority tasks ahead of it.
    std::vector<RealTimeTask> hp(rt_all.begin(), rt_all.end());
    hp.insert(hp.end(), ctx_.lower_rt.begin(), ctx_.lower_rt.begin() + j);
    lp_residual_.push_back(lp_rt_residual(ctx_.lower_rt[j], hp));
  }
  const std::span<const Demand> sec(ctx_.security);
  for (std::size_t i = 0; i < sec.size(); ++i)
    security_load_.push_back(security_workload(sec[i], sec.first(i)));
}

CandidateEval ServerProblem::evaluate(Time P) const {
  CandidateEval e{P, Time{}, false, Constraint::None, -1};
  const Rational delta = hp_wcet_sum_.exact() + hp_utilization_ * P.count();

  Time q = std::min(P, Time::floor(P.exact() - delta));
  if (q <= Time{}) {
    e.violated = Constraint::ServerSchedulability;
    return e;
  }
  for (std::size_t j = 0; j < lp_residual_.size(); ++j) {
    const Time d = ctx_.lower_rt[j].deadline;
    const Wide num = static_cast<Wide>(lp_residual_[j].count()) * P.count();
    const Wide den = (d + P).count();
    if (num < den) {  // floor(num / den) < 1, covers negative residuals
      e.violated = Constraint::LowPriorityRt;
      e.subject = static_cast<int>(j);
      return e;
    }
    q = std::min(q, Time::ticks(static_cast<std::int64_t>(num / den)));
  }
  for (std::size_t i = 0; i < security_load_.size(); ++i) {
    if (!check_supply(q, P, delta, ctx_.security[i].period, security_load_[i])) {
      e.violated = Constraint::SecuritySupply;
      e.subject = static_cast<int>(i);
      return e;
    }
  }
  e.capacity = q;
  e.feasible = true;
  return e;
}

std::string ServerProblem::subject_name(const CandidateEval& e) const {
  if (e.subject < 0) return "server";
  if (e.violated == Constraint::LowPriorityRt) return ctx_.lower_rt[e.subject].id;
  if (e.violated == Constraint::SecuritySupply) return ctx_.security_ids[e.subject];
  return "server";
}

std::vector<CandidateEval> scan_serial(const ServerProblem& problem, std::span<const Time> periods) {
  std::vector<CandidateEval> out;
  out.reserve(periods.size());
  for (Time p : periods) out.push_back(problem.evaluate(p));
  return out;
}

std::vector<CandidateEval> scan_parallel(const ServerProblem& problem, std::span<const Time> periods) {
  std::vector<CandidateEval> out(periods.size());
  const auto n = static_cast<std::int64_t>(periods.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) out[k] = problem.evaluate(periods[k]);
  return out;
}

bool better_candidate(const CandidateEval& a, const CandidateEval& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return false;
  const Wide lhs = static_cast<Wide>(a.capacity.count()) * b.period.count();
  const Wide rhs = static_cast<Wide>(b.capacity.count()) * a.period.count();
  if (lhs != rhs) return lhs > rhs;
  if (a.period != b.period) return a.period < b.period;
  return a.capacity < b.capacity;
}

namespace {

std::vector<Time> grid(Time lo, Time hi, int steps) {
  // lo + ceil(k (hi - lo) / steps), k = 0..steps (lo excluded when lo == 0).
  std::vector<Time> out;
  const auto span = (hi - lo).count();
  for (int k = 0; k <= steps; ++k) {
    const auto off = (static_cast<Wide>(span) * k + steps - 1) / steps;
    const Time p = lo + Time::ticks(static_cast<std::int64_t>(off));
    if (p <= Time{}) continue;
    if (out.empty() || out.back() != p) out.push_back(p);
  }
  return out;
}

}  // namespace

ServerSearchResult search_server(const ServerProblem& problem, const ServerSearchConfig& cfg) {
  ServerSearchResult result;
  const auto& ctx = problem.context();
  if (ctx.security.empty()) {
    result.reason = "empty security set";
    return result;
  }
  if (cfg.grid_steps < 2) throw Error("grid_steps must be at least 2");

  Time p_max = ctx.security.front().period;
  for (const auto& d : ctx.security) p_max = std::min(p_max, d.period);
  if (cfg.p_max) p_max = *cfg.p_max;
  if (p_max <= Time{}) throw Error("p_max must be positive");

  auto scan = [&](std::span<const Time> ps) {
    result.evaluations += static_cast<int>(ps.size());
    return cfg.parallel ? scan_parallel(problem, ps) : scan_serial(problem, ps);
  };

  const auto coarse_points = grid(Time{}, p_max, cfg.grid_steps);
  const auto coarse = scan(coarse_points);

  CandidateEval best{};
  for (const auto& e : coarse) {
    if (better_candidate(e, best)) best = e;
    if (e.feasible) continue;
    const std::string who = problem.subject_name(e);
    if (!result.regions.empty() && result.regions.back().violated == e.violated &&
        result.regions.back().subject == who) {
      result.regions.back().p_to = e.period;
    } else {
      result.regions.push_back({e.period, e.period, e.violated, who});
    }
  }
  if (!best.feasible) {
    const auto& first = result.regions.front();
    result.reason = "no feasible (Q, P) on the grid; first violated: " +
                    std::string(to_string(first.violated)) + " (" + first.subject + ")";
    return result;
  }

  Time half_width = Time::ticks(std::max<std::int64_t>(1, p_max.count() / cfg.grid_steps));
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    const Time lo = std::max(Time::ticks(1), best.period - half_width);
    const Time hi = std::min(p_max, best.period + half_width);
    const auto points = grid(lo, hi, cfg.grid_steps);
    for (const auto& e : scan(points))
      if (better_candidate(e, best)) best = e;
    if (half_width.count() == 1) break;
    half_width = Time::ticks(std::max<std::int64_t>(1, 2 * half_width.count() / cfg.grid_steps));
  }

  result.params = ServerParams{best.capacity, best.period, Mode::Passive, 0};
  return result;
}

ServerSearchResult select_passive_params(const TaskSet& ts, const PeriodMap& periods,
                                         const ServerSearchConfig& cfg) {
  const int m = ts.rt_count();
  ServerProblem problem(make_context(ts.rt_tasks, m, ts.passive_security, periods));
  auto result = search_server(problem, cfg);
  if (result.params) {
    result.params->mode = Mode::Passive;
    result.params->level = m;
  }
  return result;
}

ServerSearchResult select_active_params(const TaskSet& ts, int level, const PeriodMap& periods,
                                        const ServerSearchConfig& cfg) {
  const int m = ts.rt_count();
  if (level < ts.min_active_level || level > m)
    throw Error("ACTIVE level " + std::to_string(level) + " outside [l_S, m]");
  ServerProblem problem(make_context(ts.rt_tasks, level, ts.active_security, periods));
  auto result = search_server(problem, cfg);
  if (result.params) {
    result.params->mode = Mode::Active;
    result.params->level = level;
  }
  return result;
}

}  // namespace rtsec
