#pragma once

#include <optional>
#include <vector>

#include "scope/scheduler.hpp"
#include "scope/types.hpp"

namespace scope {

// Per-frame ring of the last recomputed velocities, newest last. Holds
// at most three entries; sigmas are strictly decreasing in insertion
// order. Pushing at the newest sigma replaces that entry in place, which
// absorbs repeated evaluation of frames that are resting in the window.
class VelocityHistory {
 public:
  void push(double sigma, Velocity v);

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }

  // Index from the newest entry: recent_sigma(0) is the latest sample.
  double recent_sigma(int i) const;
  const Velocity& recent_velocity(int i) const;

 private:
  struct Entry {
    double sigma;
    Velocity v;
  };
  std::vector<Entry> entries_;
};

enum class FallbackReason { insufficient_history, non_finite, degenerate_spacing };

struct PredictionOutcome {
  Velocity v_hat;
  TaylorOrder order_used = TaylorOrder::zeroth;
  bool clipped = false;
  std::optional<FallbackReason> fallback_reason;
};

struct ClipResult {
  Velocity v;
  bool clipped = false;
  bool finite = true;
};

inline constexpr double degenerate_spacing_tol = 1e-12;

// Secant extrapolation through the two newest samples:
//   v_hat = v_k + (v_k - v_{k-1}) / (sigma_k - sigma_{k-1}) * (sigma_star - sigma_k)
Velocity first_order_extrapolate(const VelocityHistory& h, double sigma_star);

// Quadratic extrapolation through the three newest samples. The
// curvature term uses the Newton form so that degree-2 velocity curves
// are reproduced exactly at any sample spacing.
Velocity second_order_extrapolate(const VelocityHistory& h, double sigma_star);

// Caps the predicted increment v_hat - v_k at
//   kappa * ||v_k - v_{k-1}||_2 * |sigma_star - sigma_k| / |sigma_k - sigma_{k-1}|
// rescaling the increment onto the cap when it is exceeded. Non-finite
// v_hat entries are reported instead of propagated.
ClipResult clip_prediction(const Velocity& v_hat, const VelocityHistory& h, double sigma_star,
                           double kappa);

// Extrapolates at cfg.predictor_order, degrading one order at a time on
// insufficient history or degenerate spacing, down to holding the
// newest velocity. Extrapolated results are clipped; a non-finite
// result after clipping also falls back to the hold.
PredictionOutcome predict_velocity(const VelocityHistory& h, double sigma_star,
                                   const SchedulerConfig& cfg);

const char* fallback_reason_name(FallbackReason reason);

}  // namespace scope
