#include "rtsec/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rtsec {

std::vector<Time> GenSpec::default_period_menu() {
  std::vector<Time> menu;
  for (int p : {4, 5, 8, 10, 16, 20, 25, 40, 50, 80, 100}) menu.push_back(Time::units(p));
  return menu;
}

std::vector<Time> GenSpec::default_security_period_menu() {
  std::vector<Time> menu;
  for (int p : {100, 200, 400, 500, 800, 1000}) menu.push_back(Time::units(p));
  return menu;
}

namespace {

void check_spec(const GenSpec& spec) {
  if (spec.n_rt < 0 || spec.n_sec < 0) throw ValidationError("task counts must be non-negative");
  if (!(spec.rt_util_target > 0.0 && spec.rt_util_target < 1.0))
    throw ValidationError("rt_util_target must lie in (0, 1)");
  if (!(spec.sec_util_fraction > 0.0 && spec.sec_util_fraction <= 1.0))
    throw ValidationError("sec_util_fraction must lie in (0, 1]");
  if (spec.period_menu.empty() || spec.security_period_menu.empty())
    throw ValidationError("period menu is empty");
  for (const auto* menu : {&spec.period_menu, &spec.security_period_menu})
    for (Time p : *menu)
      if (p <= Time{}) throw ValidationError("period menu entries must be positive");
}

Time pick(const std::vector<Time>& menu, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> u(0, menu.size() - 1);
  return menu[u(rng)];
}

std::optional<TaskSet> draw(const GenSpec& spec, std::mt19937_64& rng) {
  TaskSet ts;
  const auto rt_utils = uunifast(spec.n_rt, spec.rt_util_target, rng);
  for (int j = 0; j < spec.n_rt; ++j) {
    const Time period = pick(spec.period_menu, rng);
    const Time wcet = Time::ticks(std::llround(rt_utils[j] * static_cast<double>(period.count())));
    if (wcet <= Time{}) return std::nullopt;
    ts.rt_tasks.push_back({"r" + std::to_string(j), wcet, period, period});
  }

  const auto sec_utils = uunifast(spec.n_sec, spec.sec_util_fraction * spec.rt_util_target, rng);
  std::uniform_real_distribution<double> kappa(2.0, 5.0);
  std::uniform_int_distribution<int> weight(1, 3);
  for (int i = 0; i < spec.n_sec; ++i) {
    const Time desired = pick(spec.security_period_menu, rng);
    const Time wcet = Time::ticks(std::llround(sec_utils[i] * static_cast<double>(desired.count())));
    const Time max_period = Time::ticks(std::llround(kappa(rng) * static_cast<double>(desired.count())));
    const double w = weight(rng);
    if (wcet <= Time{} || wcet > desired) return std::nullopt;
    SecurityTask t{"sp" + std::to_string(i), wcet, desired, max_period, w, std::nullopt, {}};
    ts.passive_security.push_back(t);
    if (spec.mirror_active) {
      t.id = "sa" + std::to_string(i);
      ts.active_security.push_back(t);
    }
  }
  if (!spec.mirror_active) {
    const auto act_utils = uunifast(spec.n_sec, spec.sec_util_fraction * spec.rt_util_target, rng);
    for (int i = 0; i < spec.n_sec; ++i) {
      const Time desired = pick(spec.security_period_menu, rng);
      const Time wcet = Time::ticks(std::llround(act_utils[i] * static_cast<double>(desired.count())));
      const Time max_period = Time::ticks(std::llround(kappa(rng) * static_cast<double>(desired.count())));
      const double w = weight(rng);
      if (wcet <= Time{} || wcet > desired) return std::nullopt;
      ts.active_security.push_back({"sa" + std::to_string(i), wcet, desired, max_period, w, std::nullopt, {}});
    }
  }
  ts.min_active_level = spec.n_rt == 0 ? 0 : std::clamp(spec.min_active_level, 1, spec.n_rt);
  return ts;
}

}  // namespace

TaskSet generate(const GenSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  for (int attempt = 0; attempt < kGenerateRetries; ++attempt) {
    if (auto ts = draw(spec, rng)) {
      auto sorted = normalize(std::move(*ts));
      return sorted;
    }
  }
  throw Error("no valid task set after " + std::to_string(kGenerateRetries) +
              " draws; raise the utilization or use longer periods");
}

}  // namespace rtsec
