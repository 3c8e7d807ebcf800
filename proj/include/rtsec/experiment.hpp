#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rtsec/integration.hpp"
#include "rtsec/sim.hpp"
#include "rtsec/workload.hpp"

namespace rtsec {

struct ExperimentConfig {
  std::vector<double> util_groups = {0.1, 0.2, 0.3, 0.4, 0.5};  // base (RT) utilization
  int sets_per_point = 100;
  std::uint64_t seed = 1;
  int n_rt_min = 3, n_rt_max = 8;
  int n_sec_min = 2, n_sec_max = 4;
  double sec_util_fraction = 0.5;
  ServerSearchConfig search;
  int detection_runs = 50;
  bool parallel = true;  // sets run concurrently; the inner grid scan stays serial
  std::filesystem::path output_dir = "results";

  void validate() const;
};

// Per-set seed; independent of evaluation order.
std::uint64_t set_seed(std::uint64_t campaign_seed, int group, int index);

GenSpec spec_for_set(const ExperimentConfig& cfg, int group, int index);

struct SetRecord {
  int group = 0;
  int index = 0;
  std::uint64_t seed = 0;
  double rt_util = 0.0;
  double total_util = 0.0;  // RT plus security at desired periods
  bool rt_schedulable = false;
  bool passive_ok = false;
  bool active_ok = false;
  bool accepted = false;  // both modes feasible
  int active_level = -1;
  double eta_passive = 0.0;
  double eta_active = 0.0;
  double xi_passive = 0.0;
  double xi_active = 0.0;
  bool verified = false;   // analysis re-check and miss-free re-simulation
  std::string error;       // set when the evaluation threw
};

SetRecord evaluate_set(const ExperimentConfig& cfg, int group, int index);

// Records in (group, index) order.
std::vector<SetRecord> run_campaign_serial(const ExperimentConfig& cfg);
std::vector<SetRecord> run_campaign_parallel(const ExperimentConfig& cfg);

// RT deadline misses of `sol` simulated in each mode alone (no switching)
// over the full hyperperiod, or over the cap when the hyperperiod is larger.
int resimulate_rt_misses(const TaskSet& ts, const IntegrationSolution& sol,
                         std::int64_t cap = kDefaultHyperperiodCap);

// Built-in detection scenario: a small flight-controller workload with a
// network monitor that triggers ACTIVE mode and a host monitor that runs
// faster and at higher priority in ACTIVE mode.
struct DetectionScenario {
  TaskSet tasks;
  DetectionConfig config;
};
DetectionScenario default_detection_scenario();

// File name -> CSV content: eta_diff.csv, xi.csv, acceptance.csv,
// detection_cdf.csv.
std::map<std::string, std::string> campaign_tables(const ExperimentConfig& cfg,
                                                   const std::vector<SetRecord>& records,
                                                   const DetectionExperiment& detection);

// Runs everything and writes the CSVs (and failures.log when any set threw)
// into cfg.output_dir. Returns the written paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

}  // namespace rtsec
