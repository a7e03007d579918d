#include "scope/simulator.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "scope/interval.hpp"
#include "scope/predictor.hpp"
#include "scope/rng.hpp"

namespace scope {

namespace {

HostFeature gather_feature(const std::vector<LatentState>& frames, SlotInterval v, int dim) {
  HostFeature phi;
  phi.frame_begin = v.begin;
  phi.frame_end = v.end;
  phi.phi.resize(static_cast<Eigen::Index>(v.width()) * dim);
  for (int j = v.begin; j < v.end; ++j)
    phi.phi.segment(static_cast<Eigen::Index>(j - v.begin) * dim, dim) = frames[j].x;
  return phi;
}

struct EngineOptions {
  RunPolicy policy = RunPolicy::original;
  const SchedulerConfig* scheduler = nullptr;
  bool selective = false;
};

RunReport run_engine(const VelocityField& field, const ScheduleSpec& spec,
                     const NoiseSchedule& schedule, const CostModel& cost, std::uint64_t seed,
                     const EngineOptions& opt) {
  field.validate();
  spec.validate();
  cost.validate();
  if (opt.scheduler) opt.scheduler->validate();
  if (schedule.num_steps != spec.steps_per_frame)
    throw std::invalid_argument("noise schedule steps must equal steps_per_frame");
  const bool use_scheduler = opt.scheduler != nullptr;
  const bool selective = opt.selective;
  if (selective && spec.steps_per_frame < 2)
    throw std::invalid_argument("selective computation needs steps_per_frame >= 2");

  const int f = spec.frames;
  const int n = spec.steps_per_frame;
  const int w = baseline_window(spec.window, f);
  const StepMatrix matrix = make_step_matrix(spec);
  const int t_total = matrix.iterations();

  Rng rng(seed);
  std::vector<LatentState> frames(f);
  for (int j = 0; j < f; ++j) frames[j] = {rng.normal_vector(field.dim), 0, schedule.sigma[0]};

  std::vector<VelocityHistory> history(f);
  std::vector<Velocity> used(f);
  DiscrepancyState dstate;
  IntervalState istate;
  IntArray prev = IntArray::Zero(f);
  int frontier = 0;

  RunReport report;
  report.policy = opt.policy;
  report.seed = seed;
  report.field = field;
  report.spec = spec;
  report.noise_kind = schedule.kind;
  report.noise_steps = schedule.num_steps;
  if (use_scheduler) report.scheduler = *opt.scheduler;
  report.selective = selective;
  report.cost_model = cost;
  report.iterations = t_total;
  report.records.reserve(t_total);

  double acc_recompute = 0.0, acc_predict = 0.0, acc_cache = 0.0, acc_overhead = 0.0;
  const SchedulerConfig cfg = use_scheduler ? *opt.scheduler : SchedulerConfig{};

  for (int t = 0; t < t_total; ++t) {
    const IntArray row = matrix.row(t);
    std::vector<int> advancing;
    for (int j = 0; j < f; ++j) {
      int step = row[j] - prev[j];
      if (step < 0 || step > 1)
        throw std::invalid_argument("step matrix must advance by at most one per iteration");
      if (step == 1) advancing.push_back(j);
    }
    for (int j = f - 1; j >= 0; --j) {
      if (row[j] > 0) {
        frontier = std::max(frontier, j + 1);
        break;
      }
    }

    // The virtual previous row before t = 0 is the all-zero progress
    // state, so exactly the already-started slots count as advancing.
    const BoolArray mask = update_mask(row, prev, n);
    const SlotInterval active_window = advance_interval(istate, mask, spec.window, f);
    SlotInterval computed;
    if (selective) {
      computed = active_window;
    } else {
      int end0 = std::max(frontier, w);
      computed = {end0 - w, end0};
    }

    if (!selective) {
      for (int j : advancing)
        if (!computed.contains(j))
          throw std::invalid_argument(
              "schedule advances a frame outside the processing window; widen window");
    }

    Mode mode = Mode::recompute;
    double d = 0.0, r_minus = 0.0;
    int skips_after = 0;
    int predicted = 0, clipped = 0, fallback = 0;
    if (use_scheduler) {
      HostFeature phi = gather_feature(frames, computed, field.dim);
      bool force = false;
      if (dstate.last_phi && dstate.last_phi->phi.size() != phi.phi.size()) {
        // Window reshape: the cached step and the feature stream belong
        // to a different frame interval, so the stream restarts.
        dstate = DiscrepancyState{};
        force = true;
      }
      bool hist_ok = true;
      const int need = static_cast<int>(cfg.predictor_order) + 1;
      for (int j : advancing) {
        if (!computed.contains(j)) continue;
        if (history[j].empty()) force = true;
        if (static_cast<int>(history[j].size()) < need) hist_ok = false;
      }
      StepDecision dec = scheduler_step(dstate, phi, hist_ok, cfg, force);
      mode = dec.mode;
      d = dec.d;
      r_minus = dec.r_minus;
      skips_after = dstate.consecutive_skips;
    }

    std::vector<char> have(f, 0);
    if (mode == Mode::recompute) {
      for (int j = computed.begin; j < computed.end; ++j) {
        double sig_eval = schedule.sigma[prev[j]];
        Velocity v = eval_field(field, frames[j].x, sig_eval);
        history[j].push(sig_eval, v);
        used[j] = std::move(v);
        have[j] = 1;
      }
    } else if (mode == Mode::predict) {
      for (int j : advancing) {
        if (!computed.contains(j)) continue;
        PredictionOutcome out = predict_velocity(history[j], schedule.sigma[prev[j]], cfg);
        used[j] = std::move(out.v_hat);
        have[j] = 1;
        ++predicted;
        if (out.clipped) ++clipped;
        if (out.fallback_reason) ++fallback;
      }
    } else {
      for (int j : advancing) {
        if (!computed.contains(j)) continue;
        used[j] = history[j].recent_velocity(0);
        have[j] = 1;
      }
    }
    for (int j : advancing) {
      if (have[j]) continue;
      // Nearly finished frame below the active window: finish its last
      // steps on the newest stored velocity instead of fresh compute.
      if (history[j].empty())
        throw std::invalid_argument(
            "schedule advances a frame that was never inside a computed window; widen window");
      used[j] = history[j].recent_velocity(0);
    }

    for (int j : advancing) {
      double dsig = schedule.sigma[row[j]] - schedule.sigma[prev[j]];
      frames[j].x = euler_step(frames[j].x, used[j], dsig);
      frames[j].step_index = row[j];
      frames[j].sigma = schedule.sigma[row[j]];
    }

    double rate = mode == Mode::recompute ? cost.c_forward
                  : mode == Mode::predict ? cost.c_predict
                                          : cost.c_cache;
    double mode_cost = rate * computed.width();
    switch (mode) {
      case Mode::recompute:
        acc_recompute += mode_cost;
        ++report.recompute_steps;
        break;
      case Mode::predict:
        acc_predict += mode_cost;
        ++report.predict_steps;
        break;
      case Mode::cache:
        acc_cache += mode_cost;
        ++report.cache_steps;
        break;
    }
    acc_overhead += cost.c_overhead;

    IterationRecord rec;
    rec.t = t;
    rec.mode = mode;
    rec.computed = computed;
    rec.e_bar = istate.e_bar;
    rec.active_count = istate.history.back().active_count;
    rec.d = d;
    rec.r_minus = r_minus;
    rec.consecutive_skips = skips_after;
    rec.sigma = advancing.empty() ? 0.0 : schedule.sigma[prev[advancing.back()]];
    rec.cost = mode_cost + cost.c_overhead;
    rec.advanced = std::move(advancing);
    rec.frame_sigma.resize(f);
    for (int j = 0; j < f; ++j) rec.frame_sigma[j] = schedule.sigma[row[j]];
    rec.predicted_frames = predicted;
    rec.clipped_frames = clipped;
    rec.fallback_frames = fallback;
    report.records.push_back(std::move(rec));

    prev = row;
  }

  report.cost_recompute = acc_recompute;
  report.cost_predict = acc_predict;
  report.cost_cache = acc_cache;
  report.cost_overhead = acc_overhead;
  report.total_cost = ((acc_recompute + acc_predict) + acc_cache) + acc_overhead;
  report.terminal_latents.reserve(f);
  for (int j = 0; j < f; ++j) report.terminal_latents.push_back(frames[j].x);
  return report;
}

}  // namespace

RunReport run_original(const VelocityField& field, const ScheduleSpec& spec,
                       const NoiseSchedule& schedule, const CostModel& cost, std::uint64_t seed) {
  EngineOptions opt;
  opt.policy = RunPolicy::original;
  return run_engine(field, spec, schedule, cost, seed, opt);
}

RunReport run_scope(const VelocityField& field, const ScheduleSpec& spec,
                    const NoiseSchedule& schedule, const SchedulerConfig& scheduler,
                    const CostModel& cost, bool selective, std::uint64_t seed) {
  EngineOptions opt;
  opt.policy = RunPolicy::scope;
  opt.scheduler = &scheduler;
  opt.selective = selective;
  return run_engine(field, spec, schedule, cost, seed, opt);
}

RunReport run_reduced_step(const VelocityField& field, const ScheduleSpec& spec,
                           ScheduleKind noise_kind, int reduced_n, const CostModel& cost,
                           std::uint64_t seed) {
  if (reduced_n < 1 || reduced_n > spec.steps_per_frame)
    throw std::invalid_argument("reduced_n must be in [1, steps_per_frame]");
  ScheduleSpec reduced = spec;
  reduced.steps_per_frame = reduced_n;
  NoiseSchedule schedule = make_noise_schedule(noise_kind, reduced_n);
  EngineOptions opt;
  opt.policy = RunPolicy::reduced;
  return run_engine(field, reduced, schedule, cost, seed, opt);
}

}  // namespace scope
