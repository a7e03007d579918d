#pragma once

#include <string>

#include "scope/types.hpp"

namespace scope {

enum class ScheduleKind { linear, cosine };

// Tabulated noise levels sigma[0..num_steps], strictly decreasing from
// exactly 1 to exactly 0. Frames index into the table by step count.
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::linear;
  int num_steps = 0;
  Vector sigma;
};

NoiseSchedule make_noise_schedule(ScheduleKind kind, int num_steps);

// sigma[k+1] - sigma[k]; negative for every valid k.
double delta_sigma(const NoiseSchedule& schedule, int k);

const char* schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(const std::string& name);

}  // namespace scope
