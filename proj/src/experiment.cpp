#include "rtsec/experiment.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "rtsec/analysis.hpp"
#include "rtsec/io.hpp"

namespace rtsec {

void ExperimentConfig::validate() const {
  if (util_groups.empty()) throw ValidationError("at least one utilization group is required");
  for (double u : util_groups)
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("utilization groups must lie in (0, 1)");
  if (sets_per_point < 1) throw ValidationError("sets_per_point must be at least 1");
  if (n_rt_min < 0 || n_rt_max < n_rt_min) throw ValidationError("invalid real-time task count range");
  if (n_sec_min < 1 || n_sec_max < n_sec_min) throw ValidationError("invalid security task count range");
  if (detection_runs < 0) throw ValidationError("detection_runs must be non-negative");
}

std::uint64_t set_seed(std::uint64_t campaign_seed, int group, int index) {
  // splitmix64 over the packed coordinates
  std::uint64_t z = campaign_seed ^ (static_cast<std::uint64_t>(group) << 32) ^ static_cast<std::uint64_t>(index);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

GenSpec spec_for_set(const ExperimentConfig& cfg, int group, int index) {
  GenSpec spec;
  spec.seed = set_seed(cfg.seed, group, index);
  std::mt19937_64 rng(spec.seed ^ 0x5bd1e995ULL);
  spec.n_rt = std::uniform_int_distribution<int>(cfg.n_rt_min, cfg.n_rt_max)(rng);
  spec.n_sec = std::uniform_int_distribution<int>(cfg.n_sec_min, cfg.n_sec_max)(rng);
  spec.rt_util_target = cfg.util_groups.at(static_cast<std::size_t>(group));
  spec.sec_util_fraction = cfg.sec_util_fraction;
  spec.min_active_level = 1;
  spec.mirror_active = true;
  return spec;
}

int resimulate_rt_misses(const TaskSet& ts, const IntegrationSolution& sol, std::int64_t cap) {
  std::vector<Time> periods;
  for (const auto& t : ts.rt_tasks) periods.push_back(t.period);
  for (Mode mode : {Mode::Passive, Mode::Active}) {
    for (const auto& [id, p] : sol.periods(mode)) periods.push_back(p);
    periods.push_back(sol.server(mode).replenish_period);
  }
  SimOptions opts;
  opts.horizon = Time::ticks(lcm_capped(periods, cap).value_or(cap));
  opts.manager.enabled = false;
  opts.record_events = false;
  int misses = 0;
  for (Mode mode : {Mode::Passive, Mode::Active}) {
    opts.initial_mode = mode;
    misses += simulate(ts, &sol, opts).summary.rt_misses;
  }
  return misses;
}

SetRecord evaluate_set(const ExperimentConfig& cfg, int group, int index) {
  SetRecord r;
  r.group = group;
  r.index = index;
  const GenSpec spec = spec_for_set(cfg, group, index);
  r.seed = spec.seed;
  try {
    const TaskSet ts = generate(spec);
    r.rt_util = ts.rt_utilization();
    double sec = 0.0;
    for (const auto& t : ts.passive_security) sec += t.wcet.as_units() / t.desired_period.as_units();
    r.total_util = r.rt_util + sec;

    ServerSearchConfig search = cfg.search;
    search.parallel = false;
    const auto result = select_parameters(ts, search);
    r.rt_schedulable = !(result.failure && result.failure->branch == FailedBranch::RtBaseline);
    r.passive_ok = result.passive.feasible;
    r.active_ok = result.active.feasible;
    if (result.solution) {
      const auto& sol = *result.solution;
      r.accepted = true;
      r.active_level = sol.active_level;
      const auto metrics = compute_metrics(ts, sol);
      r.eta_passive = metrics.eta_passive;
      r.eta_active = metrics.eta_active;
      r.xi_passive = metrics.xi_passive;
      r.xi_active = metrics.xi_active;
      r.verified = verify_solution(ts, sol).ok() && resimulate_rt_misses(ts, sol) == 0;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<SetRecord> run_campaign_serial(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SetRecord> out;
  for (int g = 0; g < static_cast<int>(cfg.util_groups.size()); ++g)
    for (int i = 0; i < cfg.sets_per_point; ++i) out.push_back(evaluate_set(cfg, g, i));
  return out;
}

std::vector<SetRecord> run_campaign_parallel(const ExperimentConfig& cfg) {
  cfg.validate();
  const int groups = static_cast<int>(cfg.util_groups.size());
  const int total = groups * cfg.sets_per_point;
  std::vector<SetRecord> out(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < total; ++k)
    out[static_cast<std::size_t>(k)] = evaluate_set(cfg, k / cfg.sets_per_point, k % cfg.sets_per_point);
  return out;
}

DetectionScenario default_detection_scenario() {
  DetectionScenario sc;
  auto& ts = sc.tasks;
  ts.rt_tasks = {{"flight_ctl", Time::units(1), Time::units(10), Time::units(10)},
                 {"navigation", Time::units(2), Time::units(50), Time::units(50)},
                 {"camera", Time::units(5), Time::units(100), Time::units(100)}};
  ts.passive_security = {
      {"p_net", Time::units(2), Time::units(200), Time::units(1000), 1.0, std::nullopt, {"net"}},
      {"p_host", Time::units(5), Time::units(400), Time::units(2000), 2.0, std::nullopt, {"host"}}};
  ts.active_security = {
      {"a_net", Time::units(2), Time::units(100), Time::units(500), 1.0, std::nullopt, {"net"}},
      {"a_host", Time::units(5), Time::units(100), Time::units(500), 2.0, std::nullopt, {"host"}},
      {"a_self", Time::units(2), Time::units(200), Time::units(1000), 1.0, std::nullopt, {"host"}}};
  ts.min_active_level = 1;
  ts = normalize(std::move(ts));

  auto& cfg = sc.config;
  cfg.manager.active_timeout = Time::units(1000);
  cfg.manager.on_detect["net"] = Directive::EnterActive;
  cfg.inject_sequence = {"net", "host"};
  cfg.first_window = Time::units(500);
  cfg.gap_window = Time::units(200);
  cfg.horizon = Time::units(5000);
  return sc;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

struct GroupAgg {
  int sets = 0;
  int accepted = 0;
  int passive_ok = 0;
  int active_ok = 0;
  double total_util = 0.0;
  double eta_diff_sum = 0.0;
  double eta_diff_min = std::numeric_limits<double>::infinity();
  double eta_diff_max = -std::numeric_limits<double>::infinity();
  double xi_p = 0.0;
  double xi_a = 0.0;
};

double mean(double sum, int n) { return n > 0 ? sum / n : std::nan(""); }

}  // namespace

std::map<std::string, std::string> campaign_tables(const ExperimentConfig& cfg,
                                                   const std::vector<SetRecord>& records,
                                                   const DetectionExperiment& detection) {
  std::vector<GroupAgg> agg(cfg.util_groups.size());
  for (const auto& r : records) {
    auto& a = agg.at(static_cast<std::size_t>(r.group));
    ++a.sets;
    a.total_util += r.total_util;
    a.passive_ok += r.passive_ok;
    a.active_ok += r.active_ok;
    if (!r.accepted) continue;
    ++a.accepted;
    const double d = r.eta_active - r.eta_passive;
    a.eta_diff_sum += d;
    a.eta_diff_min = std::min(a.eta_diff_min, d);
    a.eta_diff_max = std::max(a.eta_diff_max, d);
    a.xi_p += r.xi_passive;
    a.xi_a += r.xi_active;
  }

  std::ostringstream eta, xi, acc;
  eta << "base_util,total_util_mean,sets,schedulable,eta_diff_mean,eta_diff_min,eta_diff_max\n";
  xi << "base_util,total_util_mean,schedulable,xi_passive_mean,xi_active_mean\n";
  acc << "base_util,total_util_mean,sets,accepted_passive,accepted_active,ratio_passive,ratio_active\n";
  for (std::size_t g = 0; g < agg.size(); ++g) {
    const auto& a = agg[g];
    const std::string base = num(cfg.util_groups[g]);
    const std::string tu = num(mean(a.total_util, a.sets));
    const bool any = a.accepted > 0;
    eta << base << ',' << tu << ',' << a.sets << ',' << a.accepted << ',' << num(mean(a.eta_diff_sum, a.accepted))
        << ',' << (any ? num(a.eta_diff_min) : "") << ',' << (any ? num(a.eta_diff_max) : "") << "\n";
    xi << base << ',' << tu << ',' << a.accepted << ',' << num(mean(a.xi_p, a.accepted)) << ','
       << num(mean(a.xi_a, a.accepted)) << "\n";
    acc << base << ',' << tu << ',' << a.sets << ',' << a.passive_ok << ',' << a.active_ok << ','
        << num(mean(a.passive_ok, a.sets)) << ',' << num(mean(a.active_ok, a.sets)) << "\n";
  }

  std::ostringstream cdf;
  cdf << "variant,latency,probability\n";
  auto emit = [&](const char* name, const std::vector<DetectionSample>& samples) {
    std::vector<double> lat;
    for (const auto& s : samples) lat.push_back(s.latency().as_units());
    if (lat.empty()) return;
    for (const auto& [v, p] : empirical_cdf(lat)) cdf << name << ',' << num(v) << ',' << num(p) << "\n";
  };
  emit("switching", detection.switching);
  emit("passive_only", detection.passive_only);

  return {{"eta_diff.csv", eta.str()},
          {"xi.csv", xi.str()},
          {"acceptance.csv", acc.str()},
          {"detection_cdf.csv", cdf.str()}};
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto records = cfg.parallel ? run_campaign_parallel(cfg) : run_campaign_serial(cfg);

  DetectionExperiment detection;
  if (cfg.detection_runs > 0) {
    const auto sc = default_detection_scenario();
    ServerSearchConfig search = cfg.search;
    search.parallel = false;
    const auto result = select_parameters(sc.tasks, search);
    if (!result.solution) throw Error("built-in detection scenario is unschedulable: " + result.failure->reason);
    detection = detection_experiment(sc.tasks, *result.solution, cfg.detection_runs, cfg.seed, sc.config);
  }

  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : campaign_tables(cfg, records, detection)) {
    write_file(cfg.output_dir / name, content);
    written.push_back(cfg.output_dir / name);
  }
  std::ostringstream failures;
  for (const auto& r : records) {
    if (!r.error.empty())
      failures << "group " << r.group << " set " << r.index << " seed " << r.seed << ": " << r.error << "\n";
    else if (r.accepted && !r.verified)
      failures << "group " << r.group << " set " << r.index << " seed " << r.seed
               << ": solution failed re-verification\n";
  }
  if (!failures.str().empty()) {
    write_file(cfg.output_dir / "failures.log", failures.str());
    written.push_back(cfg.output_dir / "failures.log");
  }
  return written;
}

}  // namespace rtsec
