#include "scope/predictor.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace scope {

void VelocityHistory::push(double sigma, Velocity v) {
  if (!entries_.empty()) {
    if (v.size() != entries_.back().v.size())
      throw std::invalid_argument("history velocities must share one dimension");
    double newest = entries_.back().sigma;
    if (sigma > newest) throw std::invalid_argument("history sigmas must not increase");
    if (sigma == newest) {
      entries_.back().v = std::move(v);
      return;
    }
  }
  entries_.push_back({sigma, std::move(v)});
  if (entries_.size() > 3) entries_.erase(entries_.begin());
}

double VelocityHistory::recent_sigma(int i) const {
  if (i < 0 || i >= size()) throw std::invalid_argument("history index out of range");
  return entries_[entries_.size() - 1 - static_cast<std::size_t>(i)].sigma;
}

const Velocity& VelocityHistory::recent_velocity(int i) const {
  if (i < 0 || i >= size()) throw std::invalid_argument("history index out of range");
  return entries_[entries_.size() - 1 - static_cast<std::size_t>(i)].v;
}

Velocity first_order_extrapolate(const VelocityHistory& h, double sigma_star) {
  if (h.size() < 2) throw std::invalid_argument("first-order extrapolation needs 2 samples");
  double s0 = h.recent_sigma(0);
  double s1 = h.recent_sigma(1);
  double d1 = s0 - s1;
  if (std::abs(d1) < degenerate_spacing_tol)
    throw std::invalid_argument("degenerate sample spacing");
  double dk = sigma_star - s0;
  return h.recent_velocity(0) + (h.recent_velocity(0) - h.recent_velocity(1)) * (dk / d1);
}

Velocity second_order_extrapolate(const VelocityHistory& h, double sigma_star) {
  if (h.size() < 3) throw std::invalid_argument("second-order extrapolation needs 3 samples");
  double s0 = h.recent_sigma(0);
  double s1 = h.recent_sigma(1);
  double s2 = h.recent_sigma(2);
  double d1 = s0 - s1;
  double d2 = s1 - s2;
  if (std::abs(d1) < degenerate_spacing_tol || std::abs(d2) < degenerate_spacing_tol)
    throw std::invalid_argument("degenerate sample spacing");
  double dk = sigma_star - s0;
  Velocity slope1 = (h.recent_velocity(0) - h.recent_velocity(1)) / d1;
  Velocity slope2 = (h.recent_velocity(1) - h.recent_velocity(2)) / d2;
  // Second divided difference; the (dk + d1) factor targets the second
  // Newton node so degree-2 curves come back exact.
  Velocity curvature = (slope1 - slope2) / (d1 + d2);
  return h.recent_velocity(0) + slope1 * dk + curvature * (dk * (dk + d1));
}

ClipResult clip_prediction(const Velocity& v_hat, const VelocityHistory& h, double sigma_star,
                           double kappa) {
  if (h.size() < 2) throw std::invalid_argument("clipping needs 2 samples");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  ClipResult out;
  if (!v_hat.allFinite()) {
    out.v = v_hat;
    out.finite = false;
    return out;
  }
  double s0 = h.recent_sigma(0);
  double s1 = h.recent_sigma(1);
  double d1 = std::abs(s0 - s1);
  if (d1 < degenerate_spacing_tol) throw std::invalid_argument("degenerate sample spacing");
  Velocity increment = v_hat - h.recent_velocity(0);
  double budget =
      kappa * (h.recent_velocity(0) - h.recent_velocity(1)).norm() * std::abs(sigma_star - s0) / d1;
  double norm = increment.norm();
  if (norm > budget) {
    out.v = h.recent_velocity(0) + increment * (budget / norm);
    out.clipped = true;
  } else {
    out.v = v_hat;
  }
  return out;
}

namespace {

// Returns the extrapolation at the highest feasible order <= requested,
// or nullopt when even first order is not available.
std::optional<std::pair<Velocity, TaylorOrder>> try_extrapolate(
    const VelocityHistory& h, double sigma_star, TaylorOrder requested,
    std::optional<FallbackReason>& reason) {
  auto spacing_ok = [&](int i) {
    return std::abs(h.recent_sigma(i) - h.recent_sigma(i + 1)) >= degenerate_spacing_tol;
  };
  if (requested == TaylorOrder::second) {
    if (h.size() < 3) {
      reason = FallbackReason::insufficient_history;
    } else if (!spacing_ok(0) || !spacing_ok(1)) {
      reason = FallbackReason::degenerate_spacing;
    } else {
      return std::make_pair(second_order_extrapolate(h, sigma_star), TaylorOrder::second);
    }
  }
  if (h.size() < 2) {
    if (!reason) reason = FallbackReason::insufficient_history;
    return std::nullopt;
  }
  if (!spacing_ok(0)) {
    if (!reason) reason = FallbackReason::degenerate_spacing;
    return std::nullopt;
  }
  return std::make_pair(first_order_extrapolate(h, sigma_star), TaylorOrder::first);
}

}  // namespace

PredictionOutcome predict_velocity(const VelocityHistory& h, double sigma_star,
                                   const SchedulerConfig& cfg) {
  if (h.empty()) throw std::logic_error("predict_velocity needs at least one stored velocity");
  PredictionOutcome out;
  std::optional<FallbackReason> reason;
  auto extrapolated = try_extrapolate(h, sigma_star, cfg.predictor_order, reason);
  if (!extrapolated) {
    out.v_hat = h.recent_velocity(0);
    out.order_used = TaylorOrder::zeroth;
    out.fallback_reason = reason;
    return out;
  }
  ClipResult clipped = clip_prediction(extrapolated->first, h, sigma_star, cfg.clip_kappa);
  if (!clipped.finite) {
    out.v_hat = h.recent_velocity(0);
    out.order_used = TaylorOrder::zeroth;
    out.fallback_reason = FallbackReason::non_finite;
    return out;
  }
  out.v_hat = std::move(clipped.v);
  out.order_used = extrapolated->second;
  out.clipped = clipped.clipped;
  out.fallback_reason = reason;
  return out;
}

const char* fallback_reason_name(FallbackReason reason) {
  switch (reason) {
    case FallbackReason::insufficient_history:
      return "insufficient_history";
    case FallbackReason::non_finite:
      return "non_finite";
    case FallbackReason::degenerate_spacing:
      return "degenerate_spacing";
  }
  return "?";
}

}  // namespace scope
