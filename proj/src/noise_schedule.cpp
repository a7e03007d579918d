#include "scope/noise_schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace scope {

NoiseSchedule make_noise_schedule(ScheduleKind kind, int num_steps) {
  if (num_steps < 1) throw std::invalid_argument("noise schedule needs num_steps >= 1");
  NoiseSchedule s;
  s.kind = kind;
  s.num_steps = num_steps;
  s.sigma.resize(num_steps + 1);
  const double n = static_cast<double>(num_steps);
  switch (kind) {
    case ScheduleKind::linear:
      for (int k = 0; k <= num_steps; ++k) s.sigma[k] = 1.0 - static_cast<double>(k) / n;
      break;
    case ScheduleKind::cosine: {
      // cos(pi*k/(2n))^2, rescaled so the table hits 1 and 0 exactly
      // (the raw endpoint is a rounding-sized positive value).
      const double tail = std::pow(std::cos(M_PI / 2.0), 2);
      const double head = 1.0;
      for (int k = 0; k <= num_steps; ++k) {
        double raw = std::pow(std::cos(M_PI * static_cast<double>(k) / (2.0 * n)), 2);
        s.sigma[k] = (raw - tail) / (head - tail);
      }
      break;
    }
  }
  s.sigma[0] = 1.0;
  s.sigma[num_steps] = 0.0;
  for (int k = 0; k < num_steps; ++k) {
    if (!(s.sigma[k + 1] < s.sigma[k]))
      throw std::logic_error("noise schedule is not strictly decreasing");
  }
  return s;
}

double delta_sigma(const NoiseSchedule& schedule, int k) {
  if (k < 0 || k >= schedule.num_steps)
    throw std::invalid_argument("delta_sigma index out of range");
  return schedule.sigma[k + 1] - schedule.sigma[k];
}

const char* schedule_kind_name(ScheduleKind kind) {
  return kind == ScheduleKind::linear ? "linear" : "cosine";
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
  if (name == "linear") return ScheduleKind::linear;
  if (name == "cosine") return ScheduleKind::cosine;
  throw std::invalid_argument("unknown noise schedule kind: " + name);
}

}  // namespace scope
