#pragma once

#include <optional>
#include <string>

#include "scope/types.hpp"

namespace scope {

enum class Mode { cache, predict, recompute };

enum class TaylorOrder { zeroth = 0, first = 1, second = 2 };

struct SchedulerConfig {
  double tau_c = 0.18;            // below: reuse cached step outputs
  double tau_p = 0.42;            // below (and above tau_c): extrapolate
  double lambda = 0.75;           // score decay applied after a predicted step
  int max_skip = 5;               // forced refresh horizon
  TaylorOrder predictor_order = TaylorOrder::second;
  double clip_kappa = 2.0;
  double epsilon = 1e-8;

  void validate() const;

  static SchedulerConfig skyreels_like();  // 0.18 / 0.42, second order
  static SchedulerConfig magi_like();      // 0.03 / 0.08, second order
};

// Per-stream decision state. cache_available flips true at the first
// recomputed step and stays true until the stream is reset.
struct DiscrepancyState {
  double r = 0.0;
  int consecutive_skips = 0;
  std::optional<HostFeature> last_phi;
  bool cache_available = false;
};

struct StepDecision {
  Mode mode = Mode::recompute;
  double d = 0.0;        // normalized feature discrepancy for this step
  double r_minus = 0.0;  // accumulated score the decision was taken on
};

// ||phi_k - phi_prev||_1 / (||phi_prev||_1 + epsilon). Dimensions must
// match; a mismatch means a stream boundary was skipped by the caller.
double normalized_discrepancy(const HostFeature& phi_k, const HostFeature& phi_prev,
                              double epsilon);

// Horizon check first, then the threshold ladder. Cache additionally
// needs a cached step, predict additionally needs enough history.
Mode decide_mode(double r_minus, const DiscrepancyState& state, bool history_sufficient,
                 const SchedulerConfig& cfg);

// Score transition: cache keeps the accumulated score, predict decays
// it by lambda, recompute resets it to zero.
double update_discrepancy(double r_minus, Mode mode, const SchedulerConfig& cfg);

// One full decision step: score accumulation, mode choice, state update.
// force_recompute overrides the threshold ladder (stream boundaries and
// frames that advance without any stored velocity).
StepDecision scheduler_step(DiscrepancyState& state, const HostFeature& phi_k,
                            bool history_sufficient, const SchedulerConfig& cfg,
                            bool force_recompute = false);

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);
const char* order_name(TaylorOrder order);
TaylorOrder order_from_name(const std::string& name);

}  // namespace scope
