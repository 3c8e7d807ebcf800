#include "rtsec/sim.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace rtsec {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Release: return "RELEASE";
    case EventKind::Start: return "START";
    case EventKind::Preempt: return "PREEMPT";
    case EventKind::Complete: return "COMPLETE";
    case EventKind::DeadlineMiss: return "DEADLINE_MISS";
    case EventKind::ServerReplenish: return "SERVER_REPLENISH";
    case EventKind::ServerExhaust: return "SERVER_EXHAUST";
    case EventKind::ModeSwitch: return "MODE_SWITCH";
    case EventKind::AnomalyInject: return "ANOMALY_INJECT";
    case EventKind::AnomalyDetect: return "ANOMALY_DETECT";
    case EventKind::JobAbort: return "JOB_ABORT";
  }
  return "?";
}

std::vector<std::string> check_solution_shape(const TaskSet& ts, const IntegrationSolution& sol) {
  std::vector<std::string> problems;
  const int m = ts.rt_count();
  for (Mode mode : {Mode::Passive, Mode::Active}) {
    const std::string tag = to_string(mode);
    const auto& s = sol.server(mode);
    if (s.capacity <= Time{} || s.capacity > s.replenish_period)
      problems.push_back(tag + " server requires 0 < Q <= P");
    const auto& periods = sol.periods(mode);
    const auto& tasks = ts.security(mode);
    if (periods.size() != tasks.size())
      problems.push_back(tag + " period map does not match the task set ids");
    for (const auto& t : tasks) {
      auto it = periods.find(t.id);
      if (it == periods.end()) {
        problems.push_back(tag + " period missing for " + t.id);
      } else if (it->second < t.desired_period || it->second > t.max_period) {
        problems.push_back(tag + " period of " + t.id + " outside [T_des, T_max]");
      }
    }
  }
  if (sol.passive_server.level != m) problems.push_back("PASSIVE server level must be m");
  if (sol.active_level < ts.min_active_level || sol.active_level > m ||
      sol.active_server.level != sol.active_level)
    problems.push_back("ACTIVE level inconsistent or outside [l_S, m]");
  return problems;
}

namespace {

constexpr Time kNever = Time::ticks(std::numeric_limits<std::int64_t>::max() / 4);

struct Job {
  int seq = 0;
  Time release;
  Time deadline;
  Time remaining;
  bool started = false;
  Time first_start;
  bool miss_reported = false;
};

struct TaskState {
  std::string id;
  Time wcet;
  Time period;
  Time deadline;  // relative; equals period for security tasks
  bool security = false;
  Mode mode = Mode::Passive;
  int rank = 0;  // RT priority, or RM rank inside the server
  std::vector<std::string> detects;
  Time next_release = kNever;
  int seq = 0;
  std::deque<Job> pending;
};

struct ServerState {
  ServerParams params;
  Time capacity;
  Time next_replenish;
  bool window_open = false;
  std::vector<int> tasks;  // indices into Simulator::tasks_, RM order
};

struct Anomaly {
  std::string cls;
  Time inject;
  bool detected = false;
  std::size_t sample = 0;
};

class Simulator {
 public:
  Simulator(const TaskSet& ts, const IntegrationSolution* sol, const SimOptions& opts)
      : opts_(opts), rng_(opts.release.seed) {
    for (std::size_t j = 0; j < ts.rt_tasks.size(); ++j) {
      const auto& t = ts.rt_tasks[j];
      TaskState s;
      s.id = t.id;
      s.wcet = t.wcet;
      s.period = t.period;
      s.deadline = t.deadline;
      s.rank = static_cast<int>(j);
      tasks_.push_back(std::move(s));
    }
    rt_count_ = static_cast<int>(tasks_.size());
    if (sol && opts.include_security) {
      with_server_ = true;
      for (Mode mode : {Mode::Passive, Mode::Active}) {
        auto& server = servers_[index(mode)];
        server.params = sol->server(mode);
        const auto& sec = ts.security(mode);
        const auto& periods = sol->periods(mode);
        for (std::size_t i : security_rm_order(sec, periods)) {
          const auto& t = sec[i];
          TaskState s;
          s.id = t.id;
          s.wcet = t.wcet;
          s.period = periods.at(t.id);
          s.deadline = s.period;
          s.security = true;
          s.mode = mode;
          s.rank = static_cast<int>(server.tasks.size());
          s.detects = t.detects;
          server.tasks.push_back(static_cast<int>(tasks_.size()));
          tasks_.push_back(std::move(s));
        }
      }
    }
    script_ = opts.script;
    std::stable_sort(script_.begin(), script_.end(),
                     [](const ScriptEntry& a, const ScriptEntry& b) { return a.time < b.time; });
  }

  SimTrace run() {
    mode_ = opts_.initial_mode;
    for (int j = 0; j < rt_count_; ++j) tasks_[j].next_release = first_offset(tasks_[j]);
    if (with_server_)
      for (int k : servers_[index(mode_)].tasks) tasks_[k].next_release = first_offset(tasks_[k]);
    if (mode_ == Mode::Active) active_until_ = opts_.manager.active_timeout;

    while (true) {
      process_instant();
      if (now_ >= opts_.horizon) break;
      dispatch();
      const Time next = next_event_time();
      advance(next - now_);
      now_ = next;
    }
    for (const auto& t : tasks_) trace_.summary.tasks.try_emplace(t.id);
    return std::move(trace_);
  }

 private:
  static int index(Mode m) { return m == Mode::Passive ? 0 : 1; }
  ServerState& server() { return servers_[index(mode_)]; }

  void emit(EventKind kind, std::string subject, int job = -1, std::string detail = {}) {
    if (opts_.record_events)
      trace_.events.push_back({now_, kind, std::move(subject), job, std::move(detail)});
  }

  Time jitter(Time period) {
    if (!opts_.release.jittered || opts_.release.max_jitter <= 0.0) return Time{};
    std::uniform_real_distribution<double> u(0.0, opts_.release.max_jitter);
    return Time::ticks(static_cast<std::int64_t>(u(rng_) * static_cast<double>(period.count())));
  }
  Time first_offset(const TaskState& t) { return now_ + jitter(t.period); }

  bool server_ready() {
    if (!with_server_) return false;
    auto& s = server();
    if (!s.window_open || s.capacity <= Time{}) return false;
    for (int k : s.tasks)
      if (!tasks_[k].pending.empty()) return true;
    return false;
  }
  bool server_has_work() {
    if (!with_server_) return false;
    for (int k : server().tasks)
      if (!tasks_[k].pending.empty()) return true;
    return false;
  }

  // Highest-priority eligible task, or -1 when idle.
  int choose() {
    int best_key = std::numeric_limits<int>::max();
    int choice = -1;
    for (int j = 0; j < rt_count_; ++j) {
      if (!tasks_[j].pending.empty() && 2 * j + 1 < best_key) {
        best_key = 2 * j + 1;
        choice = j;
      }
    }
    if (server_ready() && 2 * server().params.level < best_key) {
      for (int k : server().tasks) {
        if (!tasks_[k].pending.empty()) {
          choice = k;
          break;
        }
      }
    }
    return choice;
  }

  void dispatch() {
    const int choice = choose();
    const int seq = choice >= 0 ? tasks_[choice].pending.front().seq : -1;
    if (choice == running_ && seq == running_seq_) return;
    if (running_ >= 0) {
      emit(EventKind::Preempt, tasks_[running_].id, running_seq_,
           choice >= 0 ? "by " + tasks_[choice].id : "");
    }
    running_ = choice;
    running_seq_ = seq;
    if (choice >= 0) {
      auto& job = tasks_[choice].pending.front();
      if (!job.started) {
        job.started = true;
        job.first_start = now_;
      }
      emit(EventKind::Start, tasks_[choice].id, job.seq);
    }
  }

  Time next_event_time() {
    Time next = opts_.horizon;
    auto consider = [&](Time t) {
      if (t > now_ && t < next) next = t;
    };
    for (const auto& t : tasks_) {
      if (!t.security || (with_server_ && t.mode == mode_)) consider(t.next_release);
      for (const auto& j : t.pending)
        if (!j.miss_reported) consider(j.deadline);
    }
    if (with_server_) {
      for (auto& s : servers_)
        if (s.window_open) consider(s.next_replenish);
    }
    if (running_ >= 0) {
      const auto& t = tasks_[running_];
      Time end = now_ + t.pending.front().remaining;
      if (t.security) end = std::min(end, now_ + server().capacity);
      consider(end);
    }
    for (const auto& e : script_)
      if (e.time > now_) {
        consider(e.time);
        break;
      }
    if (mode_ == Mode::Active && opts_.manager.enabled) consider(active_until_);
    return next;
  }

  void advance(Time dt) {
    if (running_ < 0 || dt <= Time{}) return;
    auto& t = tasks_[running_];
    t.pending.front().remaining -= dt;
    if (t.security) server().capacity -= dt;
  }

  void complete_running() {
    if (running_ < 0) return;
    auto& t = tasks_[running_];
    auto& job = t.pending.front();
    if (job.remaining > Time{}) return;
    emit(EventKind::Complete, t.id, job.seq);
    auto& st = trace_.summary.tasks[t.id];
    ++st.completed;
    st.max_response = std::max(st.max_response, now_ - job.release);
    if (t.security) detect(t, job);
    t.pending.pop_front();
    running_ = -1;
    running_seq_ = -1;
  }

  void detect(const TaskState& t, const Job& job) {
    for (auto& a : anomalies_) {
      if (a.detected || job.first_start < a.inject) continue;
      if (std::find(t.detects.begin(), t.detects.end(), a.cls) == t.detects.end()) continue;
      a.detected = true;
      auto& sample = trace_.summary.detections[a.sample];
      sample.detect_time = now_;
      sample.detector = t.id;
      emit(EventKind::AnomalyDetect, a.cls, -1, t.id);
      if (opts_.manager.enabled) {
        auto it = opts_.manager.on_detect.find(a.cls);
        if (it != opts_.manager.on_detect.end()) pending_directives_.push_back(it->second);
        if (mode_ == Mode::Active) active_until_ = now_ + opts_.manager.active_timeout;
      }
    }
  }

  void report_misses() {
    for (auto& t : tasks_) {
      for (auto& job : t.pending) {
        if (job.miss_reported || job.deadline > now_) continue;
        job.miss_reported = true;
        emit(EventKind::DeadlineMiss, t.id, job.seq);
        ++trace_.summary.tasks[t.id].missed;
        if (t.security) ++trace_.summary.security_misses;
        else ++trace_.summary.rt_misses;
      }
    }
  }

  void update_server_windows() {
    if (!with_server_) return;
    // An exhausted server stops its job until the window ends.
    if (running_ >= 0 && tasks_[running_].security && server().capacity <= Time{}) {
      emit(EventKind::ServerExhaust, server_name(mode_), -1, tasks_[running_].id);
      running_ = -1;
      running_seq_ = -1;
    }
    for (Mode mode : {Mode::Passive, Mode::Active}) {
      auto& s = servers_[index(mode)];
      if (!s.window_open || now_ < s.next_replenish) continue;
      if (mode == mode_ && server_has_work()) {
        s.capacity = s.params.capacity;
        s.next_replenish = now_ + s.params.replenish_period;
        emit(EventKind::ServerReplenish, server_name(mode));
      } else {
        s.window_open = false;
      }
    }
  }

  void release(int k) {
    auto& t = tasks_[k];
    Job job;
    job.seq = t.seq++;
    job.release = now_;
    job.deadline = now_ + t.deadline;
    job.remaining = t.wcet;
    t.pending.push_back(job);
    ++trace_.summary.tasks[t.id].released;
    emit(EventKind::Release, t.id, job.seq);
    t.next_release = now_ + t.period + jitter(t.period);
    if (t.security) {
      auto& s = server();
      if (!s.window_open) {
        s.window_open = true;
        s.capacity = s.params.capacity;
        s.next_replenish = now_ + s.params.replenish_period;
        emit(EventKind::ServerReplenish, server_name(mode_), -1, "activate");
      }
    }
  }

  void release_due() {
    for (int k = 0; k < static_cast<int>(tasks_.size()); ++k) {
      const auto& t = tasks_[k];
      if (t.security && (!with_server_ || t.mode != mode_)) continue;
      if (t.next_release == now_) release(k);
    }
  }

  static std::string server_name(Mode m) { return std::string("server:") + to_string(m); }

  void switch_mode(Mode target, const std::string& why) {
    if (target == mode_) return;
    emit(EventKind::ModeSwitch, std::string(to_string(mode_)) + "->" + to_string(target), -1, why);
    ++trace_.summary.mode_switches;
    if (with_server_) {
      for (int k : server().tasks) {
        auto& t = tasks_[k];
        for (const auto& job : t.pending) {
          emit(EventKind::JobAbort, t.id, job.seq);
          ++trace_.summary.tasks[t.id].aborted;
        }
        t.pending.clear();
        t.next_release = kNever;
        if (running_ == k) {
          running_ = -1;
          running_seq_ = -1;
        }
      }
    }
    mode_ = target;
    if (mode_ == Mode::Active) active_until_ = now_ + opts_.manager.active_timeout;
    if (with_server_) {
      for (int k : server().tasks) release(k);
    }
  }

  void process_instant() {
    complete_running();
    report_misses();
    update_server_windows();
    if (now_ >= opts_.horizon) return;
    release_due();

    for (Directive d : pending_directives_) {
      if (d == Directive::EnterActive) switch_mode(Mode::Active, "anomaly detected");
      if (d == Directive::ExitActive) switch_mode(Mode::Passive, "anomaly cleaned up");
    }
    pending_directives_.clear();
    while (script_pos_ < script_.size() && script_[script_pos_].time <= now_) {
      const auto& e = script_[script_pos_++];
      if (e.kind == ScriptEntry::Kind::ForceMode) switch_mode(e.mode, "scripted");
      else injects_due_.push_back(e);
    }
    if (mode_ == Mode::Active && opts_.manager.enabled && now_ >= active_until_)
      switch_mode(Mode::Passive, "active timeout");

    for (const auto& e : injects_due_) {
      emit(EventKind::AnomalyInject, e.anomaly_class);
      anomalies_.push_back({e.anomaly_class, now_, false, trace_.summary.detections.size()});
      trace_.summary.detections.push_back({e.anomaly_class, now_, std::nullopt, {}});
    }
    injects_due_.clear();
  }

  const SimOptions& opts_;
  std::mt19937_64 rng_;
  std::vector<TaskState> tasks_;
  int rt_count_ = 0;
  bool with_server_ = false;
  ServerState servers_[2];
  Mode mode_ = Mode::Passive;
  Time now_;
  Time active_until_ = kNever;
  int running_ = -1;
  int running_seq_ = -1;
  std::vector<ScriptEntry> script_;
  std::size_t script_pos_ = 0;
  std::vector<ScriptEntry> injects_due_;
  std::vector<Anomaly> anomalies_;
  std::vector<Directive> pending_directives_;
  SimTrace trace_;
};

}  // namespace

SimTrace simulate(const TaskSet& ts, const IntegrationSolution* sol, const SimOptions& opts) {
  if (opts.horizon <= Time{}) throw Error("simulation horizon must be positive");
  if (sol && opts.include_security) {
    if (auto p = check_solution_shape(ts, *sol); !p.empty())
      throw Error("refusing to simulate an invalid solution: " + p.front());
  }
  return Simulator(ts, sol, opts).run();
}

std::optional<std::int64_t> lcm_capped(const std::vector<Time>& periods, std::int64_t cap) {
  std::int64_t acc = 1;
  for (Time p : periods) {
    const std::int64_t g = std::gcd(acc, p.count());
    const Wide next = static_cast<Wide>(acc / g) * p.count();
    if (next > cap) return std::nullopt;
    acc = static_cast<std::int64_t>(next);
  }
  return acc;
}

MissReport hyperperiod_check(const TaskSet& ts, const IntegrationSolution* sol, std::int64_t cap) {
  std::vector<Time> periods;
  for (const auto& t : ts.rt_tasks) periods.push_back(t.period);
  if (sol) {
    for (const auto& [id, p] : sol->passive_periods) periods.push_back(p);
    periods.push_back(sol->passive_server.replenish_period);
  }
  MissReport report;
  if (periods.empty()) return report;
  const auto h = lcm_capped(periods, cap);
  if (!h) throw Error("hyperperiod exceeds the cap of " + std::to_string(cap) + " ticks");
  report.hyperperiod = Time::ticks(*h);

  SimOptions opts;
  opts.horizon = report.hyperperiod;
  opts.include_security = sol != nullptr;
  opts.manager.enabled = false;
  const auto trace = simulate(ts, sol, opts);
  for (const auto& e : trace.events)
    if (e.kind == EventKind::DeadlineMiss) report.misses.push_back(e);
  return report;
}

DetectionExperiment detection_experiment(const TaskSet& ts, const IntegrationSolution& sol,
                                         int runs, std::uint64_t seed, const DetectionConfig& cfg) {
  DetectionExperiment out;
  std::mt19937_64 rng(seed);
  for (int r = 0; r < runs; ++r) {
    SimOptions opts;
    opts.horizon = cfg.horizon;
    opts.release = ReleasePolicy::jitter(rng(), cfg.max_jitter);
    Time at;
    for (std::size_t k = 0; k < cfg.inject_sequence.size(); ++k) {
      const Time window = k == 0 ? cfg.first_window : cfg.gap_window;
      std::uniform_int_distribution<std::int64_t> u(k == 0 ? 1 : 0, window.count());
      at += Time::ticks(u(rng));
      opts.script.push_back({at, ScriptEntry::Kind::Inject, cfg.inject_sequence[k], Mode::Passive});
    }
    opts.record_events = false;

    opts.manager = cfg.manager;
    opts.manager.enabled = true;
    const auto with = simulate(ts, &sol, opts);
    opts.manager.enabled = false;
    const auto without = simulate(ts, &sol, opts);

    for (const auto& s : with.summary.detections) {
      if (s.detect_time) out.switching.push_back(s);
      else ++out.undetected_switching;
    }
    for (const auto& s : without.summary.detections) {
      if (s.detect_time) out.passive_only.push_back(s);
      else ++out.undetected_passive;
    }
  }
  return out;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples) {
  if (samples.empty()) throw Error("empirical CDF of an empty sample set");
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double cdf_at(const std::vector<std::pair<double, double>>& cdf, double x) {
  double f = 0.0;
  for (const auto& [v, p] : cdf) {
    if (v > x) break;
    f = p;
  }
  return f;
}

}  // namespace rtsec
