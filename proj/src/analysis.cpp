#include "scope/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "scope/interval.hpp"
#include "scope/noise_schedule.hpp"
#include "scope/predictor.hpp"
#include "scope/rng.hpp"
#include "scope/simulator.hpp"

namespace scope {

namespace {

bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same_setup(const RunReport& a, const RunReport& b) {
  const VelocityField &fa = a.field, &fb = b.field;
  if (fa.kind != fb.kind || fa.dim != fb.dim) return false;
  if (!same_vector(fa.a, fb.a) || !same_vector(fa.b, fb.b) || !same_vector(fa.c, fb.c))
    return false;
  if (fa.amp != fb.amp || fa.omega != fb.omega) return false;
  if (!same_vector(fa.coupling, fb.coupling) || !same_vector(fa.drift, fb.drift)) return false;
  const ScheduleSpec &sa = a.spec, &sb = b.spec;
  if (sa.kind != sb.kind || sa.frames != sb.frames || sa.window != sb.window ||
      sa.steps_per_frame != sb.steps_per_frame || sa.stride != sb.stride ||
      sa.chunk_size != sb.chunk_size)
    return false;
  return a.noise_kind == b.noise_kind && a.noise_steps == b.noise_steps && a.seed == b.seed;
}

}  // namespace

double velocity_remainder_bound(double l2, double d_sigma) {
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
  return 0.5 * l2 * d_sigma * d_sigma;
}

double latent_drift_bound(double e_init, const std::vector<double>& step_sizes,
                          const std::vector<double>& velocity_errors) {
  if (step_sizes.size() != velocity_errors.size())
    throw std::invalid_argument("step sizes and velocity errors must pair up");
  if (!(e_init >= 0.0)) throw std::invalid_argument("e_init must be >= 0");
  double e = e_init;
  for (std::size_t i = 0; i < step_sizes.size(); ++i) {
    if (!(velocity_errors[i] >= 0.0))
      throw std::invalid_argument("velocity errors must be >= 0");
    e += std::abs(step_sizes[i]) * velocity_errors[i];
  }
  return e;
}

BoundReport verify_bounds(const RunReport& scope_report, const RunReport& oracle_report,
                          double l2) {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be finite and >= 0");
  if (scope_report.policy != RunPolicy::scope || oracle_report.policy != RunPolicy::original)
    throw std::invalid_argument("expected a scope run paired with its full-recompute oracle");
  if (!same_setup(scope_report, oracle_report))
    throw std::invalid_argument("runs disagree on field, schedule, or seed");
  if (scope_report.spec.frames != 1)
    throw std::invalid_argument("drift bounds are checked on single-frame runs");
  if (scope_report.selective)
    throw std::invalid_argument("drift bounds are checked with selective windows off");
  if (scope_report.field.kind == FieldKind::linear_state)
    throw std::invalid_argument("state-coupled fields are outside the remainder premise");
  if (scope_report.scheduler.predictor_order != TaylorOrder::first)
    throw std::invalid_argument("the drift bound covers the first-order predictor");
  for (const IterationRecord& rec : scope_report.records) {
    if (rec.mode == Mode::cache)
      throw std::invalid_argument("trace holds cached steps outside the remainder premise");
    if (rec.clipped_frames > 0 || rec.fallback_frames > 0)
      throw std::invalid_argument("trace holds clipped or fallback predictions");
  }
  const int t_total = static_cast<int>(scope_report.records.size());
  if (t_total != scope_report.noise_steps)
    throw std::invalid_argument("single-frame trace length must match the schedule");
  const NoiseSchedule schedule =
      make_noise_schedule(scope_report.noise_kind, scope_report.noise_steps);

  Rng rng(scope_report.seed);
  Vector x_hat = rng.normal_vector(scope_report.field.dim);
  Vector x_ref = x_hat;
  VelocityHistory history;

  BoundReport out;
  out.l2 = l2;
  bool in_run = false;
  double e_init = 0.0;
  std::vector<double> steps, errs;

  for (int t = 0; t < t_total; ++t) {
    const IterationRecord& rec = scope_report.records[t];
    const double sig = schedule.sigma[t];
    const double dsig = delta_sigma(schedule, t);
    const Velocity v_ref = eval_field(scope_report.field, x_ref, sig);
    Velocity v_hat;
    if (rec.mode == Mode::recompute) {
      v_hat = eval_field(scope_report.field, x_hat, sig);
      history.push(sig, v_hat);
    } else {
      if (history.size() < 2) throw std::logic_error("predicted step without enough history");
      if (!in_run) {
        in_run = true;
        e_init = (x_hat - x_ref).norm();
        steps.clear();
        errs.clear();
      }
      // Distance to the farther of the two anchors dominates the
      // interpolation remainder, so one constant covers the stretch.
      const double gap = std::abs(sig - history.recent_sigma(1));
      steps.push_back(std::abs(dsig));
      errs.push_back(velocity_remainder_bound(l2, gap));
      v_hat = predict_velocity(history, sig, scope_report.scheduler).v_hat;
    }
    x_hat = euler_step(x_hat, v_hat, dsig);
    x_ref = euler_step(x_ref, v_ref, dsig);
    if (in_run &&
        (t + 1 == t_total || scope_report.records[t + 1].mode == Mode::recompute)) {
      BoundCheckpoint cp;
      cp.t = t;
      cp.run_length = static_cast<int>(steps.size());
      cp.measured = (x_hat - x_ref).norm();
      cp.bound = latent_drift_bound(e_init, steps, errs);
      cp.margin = cp.bound - cp.measured;
      if (cp.measured > cp.bound) ++out.violations;
      out.checkpoints.push_back(cp);
      in_run = false;
    }
  }
  if ((x_hat - scope_report.terminal_latents.at(0)).norm() != 0.0 ||
      (x_ref - oracle_report.terminal_latents.at(0)).norm() != 0.0)
    throw std::logic_error("trace replay diverged from the recorded runs");
  return out;
}

DiagnosticReport reuse_vs_predict_diagnostic(const VelocityField& field,
                                             const NoiseSchedule& schedule, SlotInterval window,
                                             TaylorOrder order) {
  field.validate();
  if (order == TaylorOrder::zeroth)
    throw std::invalid_argument("the diagnostic compares extrapolation against the hold");
  const int needed = static_cast<int>(order) + 1;
  if (window.width() < 3) throw std::invalid_argument("diagnostic window needs at least 3 steps");
  if (window.begin < needed || window.end > schedule.num_steps)
    throw std::invalid_argument("diagnostic window must leave room for the velocity history");
  SchedulerConfig cfg;
  cfg.predictor_order = order;

  Vector x = Vector::Zero(field.dim);
  VelocityHistory history;
  for (int k = 0; k < window.begin; ++k) {
    Velocity v = eval_field(field, x, schedule.sigma[k]);
    history.push(schedule.sigma[k], v);
    x = euler_step(x, v, delta_sigma(schedule, k));
  }
  const Velocity held = history.recent_velocity(0);

  DiagnosticReport out;
  double reuse_sum = 0.0, predict_sum = 0.0;
  for (int k = window.begin; k < window.end; ++k) {
    const Velocity truth = eval_field(field, x, schedule.sigma[k]);
    const PredictionOutcome pred = predict_velocity(history, schedule.sigma[k], cfg);
    DiagnosticStep step;
    step.k = k;
    step.sigma = schedule.sigma[k];
    step.truth_norm = truth.norm();
    step.reuse_error = (held - truth).norm();
    step.predict_error = (pred.v_hat - truth).norm();
    reuse_sum += step.reuse_error;
    predict_sum += step.predict_error;
    out.steps.push_back(step);
    x = euler_step(x, truth, delta_sigma(schedule, k));
  }
  const double n = window.width();
  out.reuse_mae = reuse_sum / n;
  out.predict_mae = predict_sum / n;
  out.ratio = (out.reuse_mae == 0.0 && out.predict_mae == 0.0) ? 1.0
                                                               : out.predict_mae / out.reuse_mae;
  return out;
}

std::vector<ReplayCounts> open_loop_threshold_replay(
    const std::vector<double>& d_trace, const std::vector<std::pair<double, double>>& grid,
    const SchedulerConfig& base) {
  std::vector<ReplayCounts> out;
  out.reserve(grid.size());
  for (const auto& [tau_c, tau_p] : grid) {
    SchedulerConfig cfg = base;
    cfg.tau_c = tau_c;
    cfg.tau_p = tau_p;
    cfg.validate();
    DiscrepancyState state;
    ReplayCounts counts;
    counts.tau_c = tau_c;
    counts.tau_p = tau_p;
    for (double d : d_trace) {
      // Same transition as a live step, with the measured discrepancy
      // injected instead of derived from features.
      const double r_minus = state.r + d;
      const Mode mode = decide_mode(r_minus, state, true, cfg);
      state.r = update_discrepancy(r_minus, mode, cfg);
      state.consecutive_skips = mode == Mode::recompute ? 0 : state.consecutive_skips + 1;
      if (mode == Mode::recompute) state.cache_available = true;
      switch (mode) {
        case Mode::recompute:
          ++counts.recompute;
          break;
        case Mode::predict:
          ++counts.predict;
          break;
        case Mode::cache:
          ++counts.cache;
          break;
      }
    }
    out.push_back(counts);
  }
  return out;
}

CostSummary cost_accounting(const RunReport& report, const CostModel& cost) {
  cost.validate();
  const CostModel& used = report.cost_model;
  if (cost.c_forward != used.c_forward || cost.c_predict != used.c_predict ||
      cost.c_cache != used.c_cache || cost.c_overhead != used.c_overhead)
    throw std::invalid_argument("cost model differs from the one the run was priced with");

  CostSummary s;
  double acc_recompute = 0.0, acc_predict = 0.0, acc_cache = 0.0, acc_overhead = 0.0;
  for (const IterationRecord& rec : report.records) {
    const double rate = rec.mode == Mode::recompute ? cost.c_forward
                        : rec.mode == Mode::predict ? cost.c_predict
                                                    : cost.c_cache;
    const double mode_cost = rate * rec.computed.width();
    switch (rec.mode) {
      case Mode::recompute:
        acc_recompute += mode_cost;
        ++s.recompute_steps;
        break;
      case Mode::predict:
        acc_predict += mode_cost;
        ++s.predict_steps;
        break;
      case Mode::cache:
        acc_cache += mode_cost;
        ++s.cache_steps;
        break;
    }
    acc_overhead += cost.c_overhead;
    if (rec.cost != mode_cost + cost.c_overhead)
      throw std::logic_error("per-iteration cost disagrees with its decision record");
  }
  s.cost_recompute = acc_recompute;
  s.cost_predict = acc_predict;
  s.cost_cache = acc_cache;
  s.cost_overhead = acc_overhead;
  s.total_cost = ((acc_recompute + acc_predict) + acc_cache) + acc_overhead;
  if (s.total_cost != report.total_cost || acc_recompute != report.cost_recompute ||
      acc_predict != report.cost_predict || acc_cache != report.cost_cache ||
      acc_overhead != report.cost_overhead || s.recompute_steps != report.recompute_steps ||
      s.predict_steps != report.predict_steps || s.cache_steps != report.cache_steps)
    throw std::logic_error("cost re-tally disagrees with the run report");

  const int w = baseline_window(report.spec.window, report.spec.frames);
  double base_recompute = 0.0, base_overhead = 0.0;
  for (int t = 0; t < report.iterations; ++t) {
    base_recompute += cost.c_forward * w;
    base_overhead += cost.c_overhead;
  }
  s.baseline_cost = ((base_recompute + 0.0) + 0.0) + base_overhead;
  s.speedup = s.baseline_cost / s.total_cost;
  return s;
}

double terminal_error(const RunReport& a, const RunReport& b) {
  if (a.terminal_latents.size() != b.terminal_latents.size())
    throw std::invalid_argument("runs disagree on frame count");
  double sq = 0.0;
  for (std::size_t j = 0; j < a.terminal_latents.size(); ++j) {
    if (a.terminal_latents[j].size() != b.terminal_latents[j].size())
      throw std::invalid_argument("runs disagree on latent dimension");
    sq += (a.terminal_latents[j] - b.terminal_latents[j]).squaredNorm();
  }
  return std::sqrt(sq);
}

}  // namespace scope
