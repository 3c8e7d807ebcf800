#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsec/analysis.hpp"

namespace rtsec {

// Search settings for the (Q, P) selection problems.
//
// Candidate replenishment periods are P_k = ceil(k * p_max / grid_steps),
// k = 1..grid_steps. For a fixed P the best capacity is found in closed form
// (largest tick satisfying the server and low-priority constraints, then the
// supply constraint is checked), so only P is discretized. Each refinement
// round re-scans +-one step around the incumbent with the same number of
// points. Documented tolerance against any finer (P, Q/P) grid:
// eps_grid = 1 / grid_steps in Q/P.
struct ServerSearchConfig {
  std::optional<Time> p_max;  // default: smallest security period of the mode
  int grid_steps = 200;
  int refine_rounds = 3;
  bool parallel = true;

  double tolerance() const { return 1.0 / grid_steps; }
};

enum class Constraint { None, ServerSchedulability, SecuritySupply, LowPriorityRt };

const char* to_string(Constraint c);

struct CandidateEval {
  Time period;
  Time capacity;  // best capacity at this period (meaningful when feasible)
  bool feasible = false;
  Constraint violated = Constraint::None;
  int subject = -1;  // index into lower_rt or security of the context
};

// Contiguous run of grid periods that failed on the same first constraint.
struct RegionDiagnostic {
  Time p_from;
  Time p_to;
  Constraint violated;
  std::string subject;
};

struct ServerSearchResult {
  std::optional<ServerParams> params;
  std::string reason;
  std::vector<RegionDiagnostic> regions;
  int evaluations = 0;

  explicit operator bool() const { return params.has_value(); }
};

// Constant data of one server problem (fixed mode, level and security periods).
class ServerProblem {
 public:
  explicit ServerProblem(InterferenceContext ctx);

  CandidateEval evaluate(Time P) const;
  const InterferenceContext& context() const { return ctx_; }
  std::string subject_name(const CandidateEval& e) const;

 private:
  InterferenceContext ctx_;
  Time hp_wcet_sum_;
  Rational hp_utilization_;
  std::vector<Time> lp_residual_;
  std::vector<Time> security_load_;
};

// Kernels: evaluate every candidate period. Results are index-aligned with
// `periods`; the parallel kernel must match the serial one exactly.
std::vector<CandidateEval> scan_serial(const ServerProblem& problem, std::span<const Time> periods);
std::vector<CandidateEval> scan_parallel(const ServerProblem& problem, std::span<const Time> periods);

// True when `a` is a strictly better solution than `b`: larger Q/P, then
// smaller P, then smaller Q.
bool better_candidate(const CandidateEval& a, const CandidateEval& b);

ServerSearchResult search_server(const ServerProblem& problem, const ServerSearchConfig& cfg);

// PASSIVE server: lowest priority, every real-time task interferes.
ServerSearchResult select_passive_params(const TaskSet& ts, const PeriodMap& periods,
                                         const ServerSearchConfig& cfg = {});

// ACTIVE server at `level` in [l_S, m]. Throws Error if level is out of range.
ServerSearchResult select_active_params(const TaskSet& ts, int level, const PeriodMap& periods,
                                        const ServerSearchConfig& cfg = {});

}  // namespace rtsec
