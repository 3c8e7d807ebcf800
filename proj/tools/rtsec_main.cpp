// rtsec: command-line front end.
//
// Exit codes: 0 success, 2 unschedulable (or deadline misses in simulation),
// 1 any other error. RTSEC_OUTPUT_DIR sets the default output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rtsec/analysis.hpp"
#include "rtsec/experiment.hpp"
#include "rtsec/integration.hpp"
#include "rtsec/io.hpp"
#include "rtsec/sim.hpp"
#include "rtsec/workload.hpp"

namespace fs = std::filesystem;
using namespace rtsec;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUnschedulable = 2;

fs::path default_output_dir() {
  if (const char* env = std::getenv("RTSEC_OUTPUT_DIR"); env && *env) return env;
  return "results";
}

TaskSet load_valid_task_set(const std::string& path) {
  try {
    return normalize(parse_task_set(read_file(path)));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int cmd_analyze(const std::string& file) {
  const TaskSet ts = load_valid_task_set(file);
  const auto report = is_rt_schedulable(ts.rt_tasks);
  std::cout << std::left << std::setw(16) << "task" << std::setw(10) << "C" << std::setw(10) << "T"
            << std::setw(10) << "D" << "w\n";
  for (std::size_t j = 0; j < ts.rt_tasks.size(); ++j) {
    const auto& t = ts.rt_tasks[j];
    const auto& w = report.response_times[j];
    std::cout << std::setw(16) << t.id << std::setw(10) << t.wcet.to_string() << std::setw(10)
              << t.period.to_string() << std::setw(10) << t.deadline.to_string()
              << (w ? w->to_string() : "> D (unschedulable)") << "\n";
  }
  if (!report.schedulable) {
    for (std::size_t j = 0; j < ts.rt_tasks.size(); ++j)
      if (!report.response_times[j]) {
        std::cout << "unschedulable: " << ts.rt_tasks[j].id << " misses its deadline\n";
        break;
      }
    return kUnschedulable;
  }
  std::cout << "schedulable: utilization " << ts.rt_utilization() << "\n";
  return kOk;
}

int cmd_optimize(const std::string& file, const ServerSearchConfig& search, fs::path out) {
  const TaskSet ts = load_valid_task_set(file);
  const auto result = select_parameters(ts, search);
  if (!result.solution) {
    std::cout << "unschedulable (" << to_string(result.failure->branch) << "): " << result.failure->reason
              << "\nhint: " << result.failure->hint << "\n";
    return kUnschedulable;
  }
  const auto& sol = *result.solution;
  const auto metrics = compute_metrics(ts, sol);
  if (out.empty()) out = default_output_dir() / "solution.json";
  write_file(out, dump_solution(sol));

  for (Mode mode : {Mode::Passive, Mode::Active}) {
    const auto& s = sol.server(mode);
    std::cout << to_string(mode) << ": Q=" << s.capacity.to_string() << " P=" << s.replenish_period.to_string()
              << " level=" << s.level << "\n";
    for (const auto& [id, p] : sol.periods(mode)) std::cout << "  " << id << " T=" << p.to_string() << "\n";
  }
  std::cout << "l* = " << sol.active_level << "\n"
            << "eta_pa = " << metrics.eta_passive << "  eta_ac = " << metrics.eta_active << "\n"
            << "xi_pa = " << metrics.xi_passive << "  xi_ac = " << metrics.xi_active << "\n"
            << "solution written to " << out.string() << "\n";
  return kOk;
}

struct SimulateArgs {
  std::string taskset;
  std::string solution;
  std::string horizon = "1000";
  std::string scenario;
  std::uint64_t seed = 0;
  double jitter = 0.0;
  std::string initial_mode = "PASSIVE";
  fs::path out;
};

int cmd_simulate(const SimulateArgs& a) {
  const TaskSet ts = load_valid_task_set(a.taskset);
  const IntegrationSolution sol = parse_solution(read_file(a.solution));
  SimOptions opts;
  opts.horizon = Time::parse(a.horizon);
  if (a.jitter > 0.0) opts.release = ReleasePolicy::jitter(a.seed, a.jitter);
  if (a.initial_mode == "ACTIVE") opts.initial_mode = Mode::Active;
  else if (a.initial_mode != "PASSIVE") throw Error("--initial-mode must be PASSIVE or ACTIVE");
  if (!a.scenario.empty()) {
    auto sc = parse_scenario(read_file(a.scenario));
    opts.manager = std::move(sc.manager);
    opts.script = std::move(sc.script);
  }
  const auto trace = simulate(ts, &sol, opts);

  const fs::path dir = a.out.empty() ? default_output_dir() : a.out;
  std::ostringstream jsonl, csv;
  write_trace_jsonl(jsonl, trace);
  write_summary_csv(csv, trace.summary);
  write_file(dir / "trace.jsonl", jsonl.str());
  write_file(dir / "summary.csv", csv.str());

  const auto& s = trace.summary;
  std::cout << "events: " << trace.events.size() << "\nrt_misses: " << s.rt_misses
            << "\nsecurity_misses: " << s.security_misses << "\nmode_switches: " << s.mode_switches << "\n";
  std::vector<double> latencies;
  for (const auto& d : s.detections) {
    std::cout << "anomaly " << d.anomaly_class << " injected " << d.inject_time.to_string() << ": ";
    if (d.detect_time) {
      std::cout << "detected by " << d.detector << " after " << d.latency().to_string() << "\n";
      latencies.push_back(d.latency().as_units());
    } else {
      std::cout << "undetected\n";
    }
  }
  if (!latencies.empty()) {
    std::ostringstream cdf;
    write_cdf_csv(cdf, empirical_cdf(latencies));
    write_file(dir / "detection_cdf.csv", cdf.str());
  }
  std::cout << "trace written to " << (dir / "trace.jsonl").string() << "\n";
  return s.rt_misses > 0 ? kUnschedulable : kOk;
}

int cmd_generate(const GenSpec& spec, const std::string& out) {
  const std::string doc = dump_task_set(generate(spec));
  if (out.empty() || out == "-") std::cout << doc;
  else write_file(out, doc);
  return kOk;
}

int cmd_experiment(ExperimentConfig cfg) {
  const auto written = run_experiment(cfg);
  for (const auto& p : written) std::cout << p.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrates security monitoring tasks into fixed-priority real-time systems"};
  app.require_subcommand(1);

  std::string analyze_file;
  auto* analyze = app.add_subcommand("analyze", "Response-time analysis of the real-time tasks");
  analyze->add_option("taskset", analyze_file, "Task-set JSON file")->required()->check(CLI::ExistingFile);

  std::string optimize_file;
  std::string optimize_out;
  std::string p_max;
  ServerSearchConfig search;
  bool serial = false;
  auto* optimize = app.add_subcommand("optimize", "Select server parameters and periods for both modes");
  optimize->add_option("taskset", optimize_file, "Task-set JSON file")->required()->check(CLI::ExistingFile);
  optimize->add_option("-o,--output", optimize_out, "Solution file (default <output dir>/solution.json)");
  optimize->add_option("--p-max", p_max, "Largest replenishment period searched (default: smallest desired period)");
  optimize->add_option("--grid-steps", search.grid_steps, "Replenishment-period grid points")->check(CLI::Range(2, 1000000));
  optimize->add_option("--refine-rounds", search.refine_rounds, "Local refinement rounds")->check(CLI::Range(0, 100));
  optimize->add_flag("--serial", serial, "Scan the grid without OpenMP");

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Discrete-event simulation of a solution");
  simulate_cmd->add_option("taskset", sim_args.taskset, "Task-set JSON file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("solution", sim_args.solution, "Solution JSON file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--horizon", sim_args.horizon, "Simulated time in units")->capture_default_str();
  simulate_cmd->add_option("--scenario", sim_args.scenario, "Anomaly script and mode-manager JSON file")
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--seed", sim_args.seed, "Release-jitter seed");
  simulate_cmd->add_option("--jitter", sim_args.jitter, "Maximum release jitter as a fraction of the period")
      ->check(CLI::Range(0.0, 10.0));
  simulate_cmd->add_option("--initial-mode", sim_args.initial_mode, "PASSIVE or ACTIVE")->capture_default_str();
  simulate_cmd->add_option("-o,--output-dir", sim_args.out, "Directory for trace.jsonl and summary.csv");

  GenSpec gen;
  std::string gen_out;
  bool no_mirror = false;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a random task set");
  generate_cmd->add_option("--n-rt", gen.n_rt, "Real-time tasks")->capture_default_str();
  generate_cmd->add_option("--n-sec", gen.n_sec, "Security tasks per mode")->capture_default_str();
  generate_cmd->add_option("--util", gen.rt_util_target, "Real-time utilization")->capture_default_str();
  generate_cmd->add_option("--sec-fraction", gen.sec_util_fraction,
                           "Security utilization as a fraction of the real-time utilization")
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate_cmd->add_option("--min-active-level", gen.min_active_level, "l_S")->capture_default_str();
  generate_cmd->add_flag("--no-mirror", no_mirror, "Draw an independent ACTIVE security set");
  generate_cmd->add_option("-o,--output", gen_out, "Output file (default stdout)");

  std::string exp_config;
  ExperimentConfig exp;
  std::vector<double> groups;
  int sets = 0;
  int runs = -1;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false;
  std::string exp_out;
  bool exp_serial = false;
  auto* experiment = app.add_subcommand("experiment", "Run the synthetic campaign and write CSV tables");
  experiment->add_option("--config", exp_config, "Experiment configuration JSON")->check(CLI::ExistingFile);
  experiment->add_option("--groups", groups, "Base utilization groups")->delimiter(',');
  experiment->add_option("--sets", sets, "Task sets per group");
  experiment->add_option("--detection-runs", runs, "Paired detection runs");
  experiment->add_option("--seed", exp_seed, "Campaign seed")->each([&](const std::string&) { exp_seed_set = true; });
  experiment->add_option("-o,--output-dir", exp_out, "Output directory");
  experiment->add_flag("--serial", exp_serial, "Evaluate task sets one at a time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_file);
    if (*optimize) {
      if (!p_max.empty()) search.p_max = Time::parse(p_max);
      search.parallel = !serial;
      return cmd_optimize(optimize_file, search, optimize_out);
    }
    if (*simulate_cmd) return cmd_simulate(sim_args);
    if (*generate_cmd) {
      gen.mirror_active = !no_mirror;
      return cmd_generate(gen, gen_out);
    }
    if (*experiment) {
      exp.output_dir = default_output_dir();
      if (!exp_config.empty()) exp = parse_experiment_config(read_file(exp_config), exp);
      if (!groups.empty()) exp.util_groups = groups;
      if (sets > 0) exp.sets_per_point = sets;
      if (runs >= 0) exp.detection_runs = runs;
      if (exp_seed_set) exp.seed = exp_seed;
      if (!exp_out.empty()) exp.output_dir = exp_out;
      exp.parallel = !exp_serial;
      return cmd_experiment(exp);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
