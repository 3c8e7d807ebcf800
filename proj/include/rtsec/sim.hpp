#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtsec/model.hpp"

namespace rtsec {

enum class EventKind {
  Release,
  Start,
  Preempt,
  Complete,
  DeadlineMiss,
  ServerReplenish,
  ServerExhaust,
  ModeSwitch,
  AnomalyInject,
  AnomalyDetect,
  JobAbort,  // security job abandoned at a mode switch
};

const char* to_string(EventKind k);

struct SimEvent {
  Time time;
  EventKind kind;
  std::string subject;  // task id, "server:PASSIVE", anomaly class, or "PASSIVE->ACTIVE"
  int job = -1;         // job sequence number within its task
  std::string detail;
};

// Synchronous-periodic releases by default. The jittered policy adds a
// uniform [0, max_jitter * T] delay to every inter-arrival time and to each
// task's first release.
struct ReleasePolicy {
  bool jittered = false;
  double max_jitter = 0.5;
  std::uint64_t seed = 0;

  static ReleasePolicy synchronous() { return {}; }
  static ReleasePolicy jitter(std::uint64_t seed, double max_jitter = 0.5) {
    return {true, max_jitter, seed};
  }
};

enum class Directive { None, EnterActive, ExitActive };

struct ModeManagerConfig {
  bool enabled = true;
  Time active_timeout = Time::units(1000);  // T^AC
  // What to do when an anomaly of a class is detected.
  std::map<std::string, Directive> on_detect;
};

struct ScriptEntry {
  enum class Kind { Inject, ForceMode };
  Time time;
  Kind kind = Kind::Inject;
  std::string anomaly_class;  // for Inject
  Mode mode = Mode::Passive;  // for ForceMode
};

struct DetectionSample {
  std::string anomaly_class;
  Time inject_time;
  std::optional<Time> detect_time;
  std::string detector;

  Time latency() const { return *detect_time - inject_time; }
};

struct TaskStats {
  int released = 0;
  int completed = 0;
  int missed = 0;
  int aborted = 0;
  Time max_response;
};

struct SimSummary {
  int rt_misses = 0;
  int security_misses = 0;
  int mode_switches = 0;
  std::map<std::string, TaskStats> tasks;
  std::vector<DetectionSample> detections;
};

struct SimTrace {
  std::vector<SimEvent> events;
  SimSummary summary;
};

struct SimOptions {
  Time horizon;
  ReleasePolicy release;
  std::vector<ScriptEntry> script;
  ModeManagerConfig manager;
  Mode initial_mode = Mode::Passive;
  bool include_security = true;  // false simulates the real-time tasks alone
  bool record_events = true;
};

// Fixed-priority preemptive simulation of the real-time tasks plus the
// security server of the current mode. The server holds priority level
// `level` (above RT tasks with index >= level). Capacity is granted per
// replenishment window: a security release with no open window opens one
// with capacity Q ending at t + P; capacity is consumed only while a security
// job runs; an exhausted server waits for the window end, where it recharges
// to Q if work is pending. Ties at one instant are processed as COMPLETE,
// DEADLINE_MISS, SERVER_EXHAUST, SERVER_REPLENISH, RELEASE, MODE_SWITCH,
// ANOMALY_INJECT. Throws Error on an invalid solution.
SimTrace simulate(const TaskSet& ts, const IntegrationSolution* sol, const SimOptions& opts);

// Checks that `sol` is consistent with `ts` (ids, bounds, levels). Returns
// the problems found.
std::vector<std::string> check_solution_shape(const TaskSet& ts, const IntegrationSolution& sol);

struct MissReport {
  Time hyperperiod;
  std::vector<SimEvent> misses;
};

inline constexpr std::int64_t kDefaultHyperperiodCap = 10'000'000;  // ticks

// Least common multiple of tick counts; nullopt if it exceeds `cap`.
std::optional<std::int64_t> lcm_capped(const std::vector<Time>& periods, std::int64_t cap);

// Synchronous release at t = 0 and one hyperperiod of simulation. Without a
// solution only the real-time tasks run; with one, the PASSIVE server and its
// periods are included. Throws Error if the hyperperiod exceeds `cap` ticks.
MissReport hyperperiod_check(const TaskSet& ts, const IntegrationSolution* sol = nullptr,
                             std::int64_t cap = kDefaultHyperperiodCap);

struct DetectionConfig {
  ModeManagerConfig manager;
  // Anomaly classes injected in order; the first after U[0, first_window],
  // each next one U[0, gap_window] after the previous.
  std::vector<std::string> inject_sequence;
  Time first_window = Time::units(100);
  Time gap_window = Time::units(50);
  Time horizon = Time::units(2000);
  double max_jitter = 0.5;
};

struct DetectionExperiment {
  std::vector<DetectionSample> switching;
  std::vector<DetectionSample> passive_only;
  int undetected_switching = 0;
  int undetected_passive = 0;
};

// Paired runs: run r uses the same injection script and release seed with
// and without mode switching. Samples that were never detected are counted
// and excluded.
DetectionExperiment detection_experiment(const TaskSet& ts, const IntegrationSolution& sol,
                                         int runs, std::uint64_t seed, const DetectionConfig& cfg);

// Right-continuous step points (value, F(value)) of the empirical CDF, one
// per distinct sample. Throws Error on empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples);

// F(x) evaluated from the step points.
double cdf_at(const std::vector<std::pair<double, double>>& cdf, double x);

}  // namespace rtsec
