#pragma once

#include <utility>
#include <vector>

#include "scope/cost.hpp"
#include "scope/report.hpp"
#include "scope/scheduler.hpp"

namespace scope {

// (l2/2) * d_sigma^2, the worst-case first-order extrapolation error
// for a velocity whose second sigma-derivative is bounded by l2.
double velocity_remainder_bound(double l2, double d_sigma);

// e_init + sum |step| * velocity_error, accumulated in list order.
double latent_drift_bound(double e_init, const std::vector<double>& step_sizes,
                          const std::vector<double>& velocity_errors);

struct BoundCheckpoint {
  int t = 0;           // iteration closing a predicted stretch
  int run_length = 0;  // consecutive predicted steps folded in
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured, >= 0 when passing
};

struct BoundReport {
  double l2 = 0.0;
  std::vector<BoundCheckpoint> checkpoints;
  int violations = 0;
};

// Replays both single-frame traces and checks every maximal stretch of
// predicted steps against the drift bound seeded with the drift at the
// stretch start. Supports first-order, unclipped, cache-free scope
// traces on state-independent fields; anything else is rejected so a
// pass is never vacuous.
BoundReport verify_bounds(const RunReport& scope_report, const RunReport& oracle_report,
                          double l2);

struct DiagnosticStep {
  int k = 0;  // schedule step index
  double sigma = 0.0;
  double truth_norm = 0.0;
  double reuse_error = 0.0;    // hold the newest pre-window velocity
  double predict_error = 0.0;  // extrapolate from the same history
};

struct DiagnosticReport {
  std::vector<DiagnosticStep> steps;
  double reuse_mae = 0.0;
  double predict_mae = 0.0;
  double ratio = 1.0;  // predict_mae / reuse_mae, 1.0 when both are zero
};

// Freezes the velocity history just before `window` and measures how
// reuse and extrapolation degrade across the window without refresh.
DiagnosticReport reuse_vs_predict_diagnostic(const VelocityField& field,
                                             const NoiseSchedule& schedule, SlotInterval window,
                                             TaylorOrder order);

struct ReplayCounts {
  double tau_c = 0.0;
  double tau_p = 0.0;
  int recompute = 0;
  int predict = 0;
  int cache = 0;
};

// Runs the decision state machine over a fixed discrepancy trace with
// no feedback, once per (tau_c, tau_p) grid point. History is treated
// as always sufficient so the thresholds alone drive the outcome.
std::vector<ReplayCounts> open_loop_threshold_replay(
    const std::vector<double>& d_trace, const std::vector<std::pair<double, double>>& grid,
    const SchedulerConfig& base = SchedulerConfig{});

struct CostSummary {
  double total_cost = 0.0;
  double baseline_cost = 0.0;
  double speedup = 1.0;
  double cost_recompute = 0.0;
  double cost_predict = 0.0;
  double cost_cache = 0.0;
  double cost_overhead = 0.0;
  int recompute_steps = 0;
  int predict_steps = 0;
  int cache_steps = 0;
};

// Re-tallies every cost from the decision trace, reproducing the
// run loop's accumulation order so agreement is checked bitwise, and
// prices the all-recompute baseline of the same schedule.
CostSummary cost_accounting(const RunReport& report, const CostModel& cost);

// Euclidean distance between two runs' terminal latents, concatenated
// over frames.
double terminal_error(const RunReport& a, const RunReport& b);

}  // namespace scope
