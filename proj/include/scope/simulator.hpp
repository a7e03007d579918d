#pragma once

#include <cstdint>
#include <stdexcept>

#include "scope/cost.hpp"
#include "scope/field.hpp"
#include "scope/noise_schedule.hpp"
#include "scope/report.hpp"
#include "scope/scheduler.hpp"
#include "scope/step_matrix.hpp"
#include "scope/types.hpp"

namespace scope {

inline Vector euler_step(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& v,
                         double dsigma) {
  if (x.size() != v.size()) throw std::invalid_argument("euler_step dimension mismatch");
  return x + v * dsigma;
}

// Full-recompute reference: every iteration evaluates the field for
// every frame of the processing window.
RunReport run_original(const VelocityField& field, const ScheduleSpec& spec,
                       const NoiseSchedule& schedule, const CostModel& cost, std::uint64_t seed);

// Tri-modal run: one cache/predict/recompute decision per iteration,
// optionally restricted to the active frame window. Frames advancing
// outside the computed window hold their newest stored velocity so the
// per-frame sigma trajectory never deviates from the step matrix.
RunReport run_scope(const VelocityField& field, const ScheduleSpec& spec,
                    const NoiseSchedule& schedule, const SchedulerConfig& scheduler,
                    const CostModel& cost, bool selective, std::uint64_t seed);

// Full-recompute run on a schedule rebuilt with reduced_n steps per
// frame; same initial noise as the runs above for a given seed.
RunReport run_reduced_step(const VelocityField& field, const ScheduleSpec& spec,
                           ScheduleKind noise_kind, int reduced_n, const CostModel& cost,
                           std::uint64_t seed);

}  // namespace scope
