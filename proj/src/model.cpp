#include "rtsec/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace rtsec {

const char* to_string(Mode mode) { return mode == Mode::Passive ? "PASSIVE" : "ACTIVE"; }

double TaskSet::rt_utilization() const {
  double u = 0.0;
  for (const auto& t : rt_tasks) u += t.utilization();
  return u;
}

std::vector<PrioritizedTask> assign_rm_priorities(std::span<const RealTimeTask> tasks) {
  if (tasks.empty()) throw ValidationError("cannot assign priorities to an empty task sequence");
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (!ids.insert(t.id).second) throw ValidationError("duplicate task id '" + t.id + "'");
  }
  std::vector<PrioritizedTask> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back({t, 0});
  std::sort(out.begin(), out.end(), [](const PrioritizedTask& a, const PrioritizedTask& b) {
    if (a.task.period != b.task.period) return a.task.period < b.task.period;
    return a.task.id < b.task.id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].priority = static_cast<int>(i);
  return out;
}

namespace {

void check_security(const SecurityTask& t, const char* set_name, std::vector<Violation>& out) {
  const std::string who = std::string(set_name) + ":" + t.id;
  if (t.wcet <= Time{}) out.push_back({who, "wcet must be positive"});
  if (t.wcet > t.desired_period) out.push_back({who, "wcet exceeds desired_period"});
  if (t.desired_period > t.max_period) out.push_back({who, "desired_period exceeds max_period"});
  if (!(t.weight > 0.0)) out.push_back({who, "weight must be positive"});
  if (t.solved_period) {
    if (*t.solved_period < t.desired_period || *t.solved_period > t.max_period)
      out.push_back({who, "solved_period outside [desired_period, max_period]"});
  }
}

}  // namespace

std::vector<Violation> validate_task_set(const TaskSet& ts) {
  std::vector<Violation> out;
  std::set<std::string> ids;
  auto note_id = [&](const std::string& id) {
    if (id.empty()) out.push_back({id, "empty task id"});
    else if (!ids.insert(id).second) out.push_back({id, "duplicate task id"});
  };

  for (const auto& t : ts.rt_tasks) {
    note_id(t.id);
    if (t.wcet <= Time{}) out.push_back({t.id, "wcet must be positive"});
    if (t.wcet > t.deadline) out.push_back({t.id, "wcet exceeds deadline"});
    if (t.deadline > t.period) out.push_back({t.id, "deadline exceeds period"});
  }
  for (std::size_t i = 1; i < ts.rt_tasks.size(); ++i) {
    const auto& a = ts.rt_tasks[i - 1];
    const auto& b = ts.rt_tasks[i];
    if (a.period > b.period || (a.period == b.period && a.id > b.id)) {
      out.push_back({b.id, "rt_tasks not in rate-monotonic order"});
      break;
    }
  }
  for (const auto* group : {&ts.passive_security, &ts.active_security}) {
    const char* name = group == &ts.passive_security ? "passive_security" : "active_security";
    for (const auto& t : *group) {
      note_id(t.id);
      check_security(t, name, out);
    }
  }

  const int m = ts.rt_count();
  const bool level_ok = m == 0 ? ts.min_active_level == 0
                               : (ts.min_active_level > 0 && ts.min_active_level <= m);
  if (!level_ok) out.push_back({"min_active_level", "min_active_level out of range"});
  return out;
}

TaskSet normalize(TaskSet ts) {
  if (!ts.rt_tasks.empty()) {
    auto ranked = assign_rm_priorities(ts.rt_tasks);
    ts.rt_tasks.clear();
    for (auto& r : ranked) ts.rt_tasks.push_back(std::move(r.task));
  }
  if (auto v = validate_task_set(ts); !v.empty()) {
    std::string msg = "invalid task set:";
    for (const auto& x : v) msg += "\n  " + x.subject + ": " + x.message;
    throw ValidationError(msg);
  }
  return ts;
}

std::vector<std::size_t> security_rm_order(std::span<const SecurityTask> tasks,
                                           const PeriodMap& periods) {
  auto period_of = [&](const SecurityTask& t) {
    auto it = periods.find(t.id);
    return it == periods.end() ? t.desired_period : it->second;
  };
  std::vector<std::size_t> idx(tasks.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Time pa = period_of(tasks[a]);
    const Time pb = period_of(tasks[b]);
    if (pa != pb) return pa < pb;
    return tasks[a].id < tasks[b].id;
  });
  return idx;
}

PeriodMap desired_periods(std::span<const SecurityTask> tasks) {
  PeriodMap out;
  for (const auto& t : tasks) out[t.id] = t.desired_period;
  return out;
}

}  // namespace rtsec
