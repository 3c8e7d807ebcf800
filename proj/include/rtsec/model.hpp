#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsec/time.hpp"

namespace rtsec {

class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class Mode { Passive, Active };

const char* to_string(Mode mode);

// Legacy real-time task (C, T, D). Priority is implied by position in an
// RM-ordered sequence.
struct RealTimeTask {
  std::string id;
  Time wcet;
  Time period;
  Time deadline;

  double utilization() const { return wcet.as_units() / period.as_units(); }
};

// Sporadic security monitor (C, T_des, T_max, ω). Deadline is implicit and
// equals the solved period.
struct SecurityTask {
  std::string id;
  Time wcet;
  Time desired_period;
  Time max_period;
  double weight = 1.0;
  std::optional<Time> solved_period;
  // Anomaly classes this monitor can observe; used only by the simulator.
  std::vector<std::string> detects;
};

struct TaskSet {
  std::vector<RealTimeTask> rt_tasks;  // RM order after normalize()
  std::vector<SecurityTask> passive_security;
  std::vector<SecurityTask> active_security;
  int min_active_level = 1;  // l_S

  int rt_count() const { return static_cast<int>(rt_tasks.size()); }
  const std::vector<SecurityTask>& security(Mode mode) const {
    return mode == Mode::Passive ? passive_security : active_security;
  }
  double rt_utilization() const;
};

struct ServerParams {
  Time capacity;          // Q
  Time replenish_period;  // P
  Mode mode = Mode::Passive;
  int level = 0;  // m for PASSIVE, in [l_S, m] for ACTIVE

  Rational bandwidth() const { return ratio(capacity, replenish_period); }
  friend bool operator==(const ServerParams&, const ServerParams&) = default;
};

using PeriodMap = std::map<std::string, Time>;

// Full output of the parameter-selection pipeline.
struct IntegrationSolution {
  ServerParams passive_server;
  ServerParams active_server;
  PeriodMap passive_periods;
  PeriodMap active_periods;
  int active_level = 0;  // l*
  double passive_tightness = 0.0;
  double active_tightness = 0.0;

  const ServerParams& server(Mode mode) const {
    return mode == Mode::Passive ? passive_server : active_server;
  }
  const PeriodMap& periods(Mode mode) const {
    return mode == Mode::Passive ? passive_periods : active_periods;
  }
};

struct PrioritizedTask {
  RealTimeTask task;
  int priority = 0;  // 0 is highest
};

// Sorts by ascending period; equal periods are ordered by ascending id.
// Throws ValidationError on empty input or duplicate ids.
std::vector<PrioritizedTask> assign_rm_priorities(std::span<const RealTimeTask> tasks);

struct Violation {
  std::string subject;
  std::string message;
};

// Every violated invariant, not only the first one.
std::vector<Violation> validate_task_set(const TaskSet& ts);

// Puts rt_tasks into RM order. Throws ValidationError if the set is invalid.
TaskSet normalize(TaskSet ts);

// Security tasks ordered by RM on the given periods (ties by id). Tasks that
// are missing from `periods` fall back to their desired period.
std::vector<std::size_t> security_rm_order(std::span<const SecurityTask> tasks,
                                           const PeriodMap& periods);

PeriodMap desired_periods(std::span<const SecurityTask> tasks);

}  // namespace rtsec
