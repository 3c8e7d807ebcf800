#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsec/model.hpp"
#include "rtsec/server_opt.hpp"

namespace rtsec {

enum class FailedBranch { RtBaseline, Passive, Active };

const char* to_string(FailedBranch b);

struct Unschedulable {
  FailedBranch branch;
  std::string reason;
  std::string hint;
};

// Outcome of one mode's parameter selection.
struct BranchResult {
  bool feasible = false;
  ServerParams server;
  PeriodMap periods;
  double tightness = 0.0;
  std::string reason;
};

struct LevelCandidate {
  int level = 0;
  BranchResult branch;
};

struct IntegrationResult {
  std::optional<IntegrationSolution> solution;
  std::optional<Unschedulable> failure;
  BranchResult passive;
  BranchResult active;
  std::vector<LevelCandidate> levels;  // every ACTIVE level tried, ascending

  explicit operator bool() const { return solution.has_value(); }
};

// Feasibility check and parameter selection for both modes.
//
// PASSIVE: server (Q, P) with periods at T_des, then periods from the
// server-based adaptation. ACTIVE: the same for every level in [l_S, m]; the
// level with the largest tightness wins (ties go to the larger level). A
// solution is returned only if both modes succeed. `ts` must be normalized.
IntegrationResult select_parameters(const TaskSet& ts, const ServerSearchConfig& cfg = {});

BranchResult solve_passive(const TaskSet& ts, const ServerSearchConfig& cfg);
BranchResult solve_active_level(const TaskSet& ts, int level, const ServerSearchConfig& cfg);

// sum of w_i T_des / T_i. Throws Error if any task has no period in `periods`.
double tightness(std::span<const SecurityTask> tasks, const PeriodMap& periods);

// 1 - ||T* - T_des||_2 / ||T_max - T_des||_2. Throws Error on length mismatch,
// empty input, or a zero denominator ("degenerate bounds").
double effectiveness_xi(std::span<const double> solved, std::span<const double> desired,
                        std::span<const double> maximum);

struct MetricsReport {
  double eta_passive = 0.0;
  double eta_active = 0.0;
  double eta_diff = 0.0;
  double xi_passive = 1.0;
  double xi_active = 1.0;
  std::map<std::string, double> per_task_tightness;
};

// ξ is computed per mode over that mode's tasks; a mode whose tasks all have
// T_max == T_des reports ξ = 1.
MetricsReport compute_metrics(const TaskSet& ts, const IntegrationSolution& sol);

struct SolutionCheck {
  std::vector<std::string> errors;    // hard violations
  std::vector<std::string> warnings;  // supply re-check at solved periods

  bool ok() const { return errors.empty(); }
};

// Re-verifies a solution from scratch against every analysis constraint and
// model invariant.
SolutionCheck verify_solution(const TaskSet& ts, const IntegrationSolution& sol);

}  // namespace rtsec
