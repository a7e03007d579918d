#include "scope/scheduler.hpp"

#include <cmath>
#include <stdexcept>

namespace scope {

void SchedulerConfig::validate() const {
  if (!(tau_c >= 0.0) || !std::isfinite(tau_c)) throw std::invalid_argument("tau_c must be >= 0");
  if (!(tau_p >= tau_c) || !std::isfinite(tau_p))
    throw std::invalid_argument("tau_p must be >= tau_c");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in (0, 1]");
  if (max_skip < 1) throw std::invalid_argument("max_skip must be >= 1");
  if (predictor_order != TaylorOrder::first && predictor_order != TaylorOrder::second)
    throw std::invalid_argument("predictor_order must be first or second");
  if (!(clip_kappa > 0.0)) throw std::invalid_argument("clip_kappa must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
}

SchedulerConfig SchedulerConfig::skyreels_like() {
  SchedulerConfig cfg;
  cfg.tau_c = 0.18;
  cfg.tau_p = 0.42;
  return cfg;
}

SchedulerConfig SchedulerConfig::magi_like() {
  SchedulerConfig cfg;
  cfg.tau_c = 0.03;
  cfg.tau_p = 0.08;
  return cfg;
}

double normalized_discrepancy(const HostFeature& phi_k, const HostFeature& phi_prev,
                              double epsilon) {
  if (phi_k.phi.size() != phi_prev.phi.size())
    throw std::invalid_argument("feature dimension changed without a stream reset");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  double num = (phi_k.phi - phi_prev.phi).lpNorm<1>();
  double den = phi_prev.phi.lpNorm<1>() + epsilon;
  return num / den;
}

Mode decide_mode(double r_minus, const DiscrepancyState& state, bool history_sufficient,
                 const SchedulerConfig& cfg) {
  if (state.consecutive_skips >= cfg.max_skip) return Mode::recompute;
  if (r_minus < cfg.tau_c && state.cache_available) return Mode::cache;
  if (r_minus >= cfg.tau_c && r_minus < cfg.tau_p && history_sufficient) return Mode::predict;
  return Mode::recompute;
}

double update_discrepancy(double r_minus, Mode mode, const SchedulerConfig& cfg) {
  switch (mode) {
    case Mode::cache:
      return r_minus;
    case Mode::predict:
      return cfg.lambda * r_minus;
    case Mode::recompute:
      return 0.0;
  }
  throw std::logic_error("unreachable");
}

StepDecision scheduler_step(DiscrepancyState& state, const HostFeature& phi_k,
                            bool history_sufficient, const SchedulerConfig& cfg,
                            bool force_recompute) {
  StepDecision out;
  out.d = state.last_phi ? normalized_discrepancy(phi_k, *state.last_phi, cfg.epsilon) : 0.0;
  out.r_minus = state.r + out.d;
  out.mode = force_recompute ? Mode::recompute
                             : decide_mode(out.r_minus, state, history_sufficient, cfg);
  state.r = update_discrepancy(out.r_minus, out.mode, cfg);
  state.consecutive_skips = out.mode == Mode::recompute ? 0 : state.consecutive_skips + 1;
  if (out.mode == Mode::recompute) state.cache_available = true;
  state.last_phi = phi_k;
  return out;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::cache:
      return "cache";
    case Mode::predict:
      return "predict";
    case Mode::recompute:
      return "recompute";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  if (name == "cache") return Mode::cache;
  if (name == "predict") return Mode::predict;
  if (name == "recompute") return Mode::recompute;
  throw std::invalid_argument("unknown mode: " + name);
}

const char* order_name(TaylorOrder order) {
  switch (order) {
    case TaylorOrder::zeroth:
      return "zeroth";
    case TaylorOrder::first:
      return "first";
    case TaylorOrder::second:
      return "second";
  }
  return "?";
}

TaylorOrder order_from_name(const std::string& name) {
  if (name == "zeroth") return TaylorOrder::zeroth;
  if (name == "first") return TaylorOrder::first;
  if (name == "second") return TaylorOrder::second;
  throw std::invalid_argument("unknown predictor order: " + name);
}

}  // namespace scope
