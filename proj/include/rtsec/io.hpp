#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rtsec/experiment.hpp"
#include "rtsec/model.hpp"
#include "rtsec/sim.hpp"

namespace rtsec {

// Task-set document (JSON):
//   {"rt_tasks": [{"id", "wcet", "period", "deadline"}],
//    "passive_security": [{"id", "wcet", "desired_period", "max_period",
//                          "weight", "solved_period"?, "detects"?}],
//    "active_security": [...], "min_active_level": int}
// Times are decimal strings in units ("2.5"); plain JSON numbers are also
// accepted. Unknown fields are rejected. `deadline` defaults to `period`.
TaskSet parse_task_set(const std::string& text);
std::string dump_task_set(const TaskSet& ts);

// Solution document: passive_server / active_server as {"capacity",
// "replenish_period", "level"}, passive_periods / active_periods as id -> time,
// active_level, passive_tightness, active_tightness.
IntegrationSolution parse_solution(const std::string& text);
std::string dump_solution(const IntegrationSolution& sol);

// Simulation scenario: {"active_timeout", "on_detect": {class: "enter_active"
// | "exit_active" | "none"}, "events": [{"time", "inject": class} |
// {"time", "mode": "PASSIVE" | "ACTIVE"}]}.
struct Scenario {
  ModeManagerConfig manager;
  std::vector<ScriptEntry> script;
};
Scenario parse_scenario(const std::string& text);

// Experiment configuration: any subset of {"util_groups", "sets_per_point",
// "seed", "n_rt_min", "n_rt_max", "n_sec_min", "n_sec_max",
// "sec_util_fraction", "grid_steps", "refine_rounds", "detection_runs",
// "output_dir"}; missing keys keep the values of `base`.
ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig base = {});

// One JSON object per line, then a final {"summary": ...} line.
void write_trace_jsonl(std::ostream& out, const SimTrace& trace);
// task,released,completed,missed,aborted,max_response
void write_summary_csv(std::ostream& out, const SimSummary& summary);
// value,probability
void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rtsec
