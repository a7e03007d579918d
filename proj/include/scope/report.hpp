#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scope/cost.hpp"
#include "scope/field.hpp"
#include "scope/interval.hpp"
#include "scope/noise_schedule.hpp"
#include "scope/scheduler.hpp"
#include "scope/step_matrix.hpp"
#include "scope/types.hpp"

namespace scope {

enum class RunPolicy { original, scope, reduced };

struct IterationRecord {
  int t = 0;
  Mode mode = Mode::recompute;
  SlotInterval computed;  // frames evaluated and charged this iteration
  int e_bar = 0;          // running active-window end
  int active_count = 0;   // masked-active slots this iteration
  double d = 0.0;
  double r_minus = 0.0;
  int consecutive_skips = 0;
  double sigma = 1.0;  // pre-step noise level of the newest advancing frame
  double cost = 0.0;   // mode rate * width + overhead
  std::vector<int> advanced;
  std::vector<double> frame_sigma;  // post-step noise level per frame
  int predicted_frames = 0;
  int clipped_frames = 0;
  int fallback_frames = 0;
};

struct RunReport {
  RunPolicy policy = RunPolicy::original;
  std::uint64_t seed = 0;
  VelocityField field;
  ScheduleSpec spec;
  ScheduleKind noise_kind = ScheduleKind::linear;
  int noise_steps = 0;
  SchedulerConfig scheduler;  // meaningful only for the scope policy
  bool selective = false;
  CostModel cost_model;
  int iterations = 0;
  // Canonical tally: the four buckets are accumulated in iteration
  // order and total_cost is their fixed-order sum. Re-tallies must
  // reproduce the same grouping to compare bitwise.
  double total_cost = 0.0;
  double cost_recompute = 0.0;
  double cost_predict = 0.0;
  double cost_cache = 0.0;
  double cost_overhead = 0.0;
  int recompute_steps = 0;
  int predict_steps = 0;
  int cache_steps = 0;
  std::vector<IterationRecord> records;
  std::vector<Vector> terminal_latents;
};

const char* run_policy_name(RunPolicy policy);

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// Decision and window trace, one row per iteration:
//   step_index,sigma,d_k,r_minus,mode,consecutive_skips,
//   e_bar,v_begin,v_end,active_count,cost
std::string trace_csv(const RunReport& report);

std::string report_json(const RunReport& report);

}  // namespace scope
