#include "rtsec/io.hpp"

#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rtsec {

using nlohmann::json;

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_context(text, e.byte) + ": " + e.what());
  }
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ParseError(where + ": unknown field \"" + key + "\"");
}

const json& field(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

Time as_time(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return Time::parse(v.get<std::string>());
    if (v.is_number_unsigned() || v.is_number_integer()) return Time::parse(v.dump());
    if (v.is_number_float()) return Time::parse(v.dump());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ": expected a time as a decimal string");
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  return v;
}

std::vector<SecurityTask> parse_security(const json& arr, const std::string& name) {
  std::vector<SecurityTask> out;
  std::size_t k = 0;
  for (const auto& item : as_array(arr, name)) {
    const std::string where = name + "[" + std::to_string(k++) + "]";
    only_fields(item, where, {"id", "wcet", "desired_period", "max_period", "weight", "solved_period", "detects"});
    SecurityTask t;
    t.id = as_string(field(item, where, "id"), where + ".id");
    t.wcet = as_time(field(item, where, "wcet"), where + ".wcet");
    t.desired_period = as_time(field(item, where, "desired_period"), where + ".desired_period");
    t.max_period = as_time(field(item, where, "max_period"), where + ".max_period");
    t.weight = item.contains("weight") ? as_double(item["weight"], where + ".weight") : 1.0;
    if (item.contains("solved_period"))
      t.solved_period = as_time(item["solved_period"], where + ".solved_period");
    if (item.contains("detects")) {
      for (const auto& d : as_array(item["detects"], where + ".detects"))
        t.detects.push_back(as_string(d, where + ".detects"));
    }
    out.push_back(std::move(t));
  }
  return out;
}

json dump_security(const std::vector<SecurityTask>& tasks) {
  json arr = json::array();
  for (const auto& t : tasks) {
    json o = {{"id", t.id},
              {"wcet", t.wcet.to_string()},
              {"desired_period", t.desired_period.to_string()},
              {"max_period", t.max_period.to_string()},
              {"weight", t.weight}};
    if (t.solved_period) o["solved_period"] = t.solved_period->to_string();
    if (!t.detects.empty()) o["detects"] = t.detects;
    arr.push_back(std::move(o));
  }
  return arr;
}

json dump_server(const ServerParams& s) {
  return {{"capacity", s.capacity.to_string()},
          {"replenish_period", s.replenish_period.to_string()},
          {"level", s.level}};
}

ServerParams parse_server(const json& v, const std::string& where, Mode mode) {
  only_fields(v, where, {"capacity", "replenish_period", "level", "mode"});
  ServerParams s;
  s.capacity = as_time(field(v, where, "capacity"), where + ".capacity");
  s.replenish_period = as_time(field(v, where, "replenish_period"), where + ".replenish_period");
  s.level = as_int(field(v, where, "level"), where + ".level");
  s.mode = mode;
  return s;
}

json dump_periods(const PeriodMap& m) {
  json o = json::object();
  for (const auto& [id, p] : m) o[id] = p.to_string();
  return o;
}

PeriodMap parse_periods(const json& v, const std::string& where) {
  if (!v.is_object()) throw ParseError(where + ": expected an object of id -> time");
  PeriodMap m;
  for (const auto& [id, p] : v.items()) m[id] = as_time(p, where + "." + id);
  return m;
}

std::string csv_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

TaskSet parse_task_set(const std::string& text) {
  const json doc = parse_json(text);
  only_fields(doc, "task set", {"rt_tasks", "passive_security", "active_security", "min_active_level"});
  TaskSet ts;
  std::size_t k = 0;
  for (const auto& item : as_array(field(doc, "task set", "rt_tasks"), "rt_tasks")) {
    const std::string where = "rt_tasks[" + std::to_string(k++) + "]";
    only_fields(item, where, {"id", "wcet", "period", "deadline"});
    RealTimeTask t;
    t.id = as_string(field(item, where, "id"), where + ".id");
    t.wcet = as_time(field(item, where, "wcet"), where + ".wcet");
    t.period = as_time(field(item, where, "period"), where + ".period");
    t.deadline = item.contains("deadline") ? as_time(item["deadline"], where + ".deadline") : t.period;
    ts.rt_tasks.push_back(std::move(t));
  }
  if (doc.contains("passive_security")) ts.passive_security = parse_security(doc["passive_security"], "passive_security");
  if (doc.contains("active_security")) ts.active_security = parse_security(doc["active_security"], "active_security");
  ts.min_active_level = as_int(field(doc, "task set", "min_active_level"), "min_active_level");
  return ts;
}

std::string dump_task_set(const TaskSet& ts) {
  json rt = json::array();
  for (const auto& t : ts.rt_tasks)
    rt.push_back({{"id", t.id},
                  {"wcet", t.wcet.to_string()},
                  {"period", t.period.to_string()},
                  {"deadline", t.deadline.to_string()}});
  json doc = {{"rt_tasks", rt},
              {"passive_security", dump_security(ts.passive_security)},
              {"active_security", dump_security(ts.active_security)},
              {"min_active_level", ts.min_active_level}};
  return doc.dump(2) + "\n";
}

IntegrationSolution parse_solution(const std::string& text) {
  const json doc = parse_json(text);
  only_fields(doc, "solution", {"passive_server", "active_server", "passive_periods", "active_periods",
                                "active_level", "passive_tightness", "active_tightness"});
  IntegrationSolution sol;
  sol.passive_server = parse_server(field(doc, "solution", "passive_server"), "passive_server", Mode::Passive);
  sol.active_server = parse_server(field(doc, "solution", "active_server"), "active_server", Mode::Active);
  sol.passive_periods = parse_periods(field(doc, "solution", "passive_periods"), "passive_periods");
  sol.active_periods = parse_periods(field(doc, "solution", "active_periods"), "active_periods");
  sol.active_level = as_int(field(doc, "solution", "active_level"), "active_level");
  sol.passive_tightness = doc.contains("passive_tightness") ? as_double(doc["passive_tightness"], "passive_tightness") : 0.0;
  sol.active_tightness = doc.contains("active_tightness") ? as_double(doc["active_tightness"], "active_tightness") : 0.0;
  return sol;
}

std::string dump_solution(const IntegrationSolution& sol) {
  json doc = {{"passive_server", dump_server(sol.passive_server)},
              {"active_server", dump_server(sol.active_server)},
              {"passive_periods", dump_periods(sol.passive_periods)},
              {"active_periods", dump_periods(sol.active_periods)},
              {"active_level", sol.active_level},
              {"passive_tightness", sol.passive_tightness},
              {"active_tightness", sol.active_tightness}};
  return doc.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  const json doc = parse_json(text);
  only_fields(doc, "scenario", {"active_timeout", "on_detect", "events"});
  Scenario sc;
  if (doc.contains("active_timeout")) {
    sc.manager.active_timeout = as_time(doc["active_timeout"], "active_timeout");
    if (sc.manager.active_timeout <= Time{}) throw ParseError("active_timeout must be positive");
  }
  if (doc.contains("on_detect")) {
    const auto& m = doc["on_detect"];
    if (!m.is_object()) throw ParseError("on_detect: expected an object");
    for (const auto& [cls, d] : m.items()) {
      const std::string s = as_string(d, "on_detect." + cls);
      if (s == "enter_active") sc.manager.on_detect[cls] = Directive::EnterActive;
      else if (s == "exit_active") sc.manager.on_detect[cls] = Directive::ExitActive;
      else if (s == "none") sc.manager.on_detect[cls] = Directive::None;
      else throw ParseError("on_detect." + cls + ": unknown directive \"" + s + "\"");
    }
  }
  if (doc.contains("events")) {
    std::size_t k = 0;
    for (const auto& e : as_array(doc["events"], "events")) {
      const std::string where = "events[" + std::to_string(k++) + "]";
      only_fields(e, where, {"time", "inject", "mode"});
      ScriptEntry entry;
      entry.time = as_time(field(e, where, "time"), where + ".time");
      if (e.contains("inject") == e.contains("mode"))
        throw ParseError(where + ": exactly one of \"inject\" and \"mode\" is required");
      if (e.contains("inject")) {
        entry.kind = ScriptEntry::Kind::Inject;
        entry.anomaly_class = as_string(e["inject"], where + ".inject");
      } else {
        entry.kind = ScriptEntry::Kind::ForceMode;
        const std::string m = as_string(e["mode"], where + ".mode");
        if (m == "PASSIVE") entry.mode = Mode::Passive;
        else if (m == "ACTIVE") entry.mode = Mode::Active;
        else throw ParseError(where + ".mode: expected PASSIVE or ACTIVE");
      }
      sc.script.push_back(std::move(entry));
    }
  }
  return sc;
}

ExperimentConfig parse_experiment_config(const std::string& text, ExperimentConfig base) {
  const json doc = parse_json(text);
  only_fields(doc, "experiment config",
              {"util_groups", "sets_per_point", "seed", "n_rt_min", "n_rt_max", "n_sec_min", "n_sec_max",
               "sec_util_fraction", "grid_steps", "refine_rounds", "detection_runs", "output_dir"});
  ExperimentConfig cfg = std::move(base);
  if (doc.contains("util_groups")) {
    cfg.util_groups.clear();
    for (const auto& u : as_array(doc["util_groups"], "util_groups")) cfg.util_groups.push_back(as_double(u, "util_groups"));
  }
  auto get_int = [&](const char* key, int& dst) {
    if (doc.contains(key)) dst = as_int(doc[key], key);
  };
  get_int("sets_per_point", cfg.sets_per_point);
  get_int("n_rt_min", cfg.n_rt_min);
  get_int("n_rt_max", cfg.n_rt_max);
  get_int("n_sec_min", cfg.n_sec_min);
  get_int("n_sec_max", cfg.n_sec_max);
  get_int("grid_steps", cfg.search.grid_steps);
  get_int("refine_rounds", cfg.search.refine_rounds);
  get_int("detection_runs", cfg.detection_runs);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ParseError("seed: expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("sec_util_fraction")) cfg.sec_util_fraction = as_double(doc["sec_util_fraction"], "sec_util_fraction");
  if (doc.contains("output_dir")) cfg.output_dir = as_string(doc["output_dir"], "output_dir");
  cfg.validate();
  return cfg;
}

void write_trace_jsonl(std::ostream& out, const SimTrace& trace) {
  for (const auto& e : trace.events) {
    json o = {{"time", e.time.to_string()}, {"kind", to_string(e.kind)}, {"subject", e.subject}};
    if (e.job >= 0) o["job"] = e.job;
    if (!e.detail.empty()) o["detail"] = e.detail;
    out << o.dump() << "\n";
  }
  const auto& s = trace.summary;
  json tasks = json::object();
  for (const auto& [id, st] : s.tasks)
    tasks[id] = {{"released", st.released},
                 {"completed", st.completed},
                 {"missed", st.missed},
                 {"aborted", st.aborted},
                 {"max_response", st.max_response.to_string()}};
  json det = json::array();
  for (const auto& d : s.detections) {
    json o = {{"class", d.anomaly_class}, {"inject", d.inject_time.to_string()}};
    if (d.detect_time) {
      o["detect"] = d.detect_time->to_string();
      o["latency"] = d.latency().to_string();
      o["detector"] = d.detector;
    } else {
      o["detect"] = nullptr;
    }
    det.push_back(std::move(o));
  }
  json summary = {{"rt_misses", s.rt_misses},
                  {"security_misses", s.security_misses},
                  {"mode_switches", s.mode_switches},
                  {"tasks", tasks},
                  {"detections", det}};
  out << json{{"summary", summary}}.dump() << "\n";
}

void write_summary_csv(std::ostream& out, const SimSummary& summary) {
  out << "task,released,completed,missed,aborted,max_response\n";
  for (const auto& [id, st] : summary.tasks)
    out << id << ',' << st.released << ',' << st.completed << ',' << st.missed << ',' << st.aborted << ','
        << st.max_response.to_string() << "\n";
}

void write_cdf_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cdf) {
  out << "value,probability\n";
  for (const auto& [v, p] : cdf) out << csv_number(v) << ',' << csv_number(p) << "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace rtsec
