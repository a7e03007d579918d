#include "scope/step_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace scope {

void ScheduleSpec::validate() const {
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (steps_per_frame < 1) throw std::invalid_argument("steps_per_frame must be >= 1");
  if (kind == ScheduleMatrixKind::staircase && stride < 1)
    throw std::invalid_argument("stride must be >= 1");
  if (kind == ScheduleMatrixKind::chunk_sync && chunk_size < 1)
    throw std::invalid_argument("chunk_size must be >= 1");
}

StepMatrix make_step_matrix(const ScheduleSpec& spec) {
  spec.validate();
  const int f = spec.frames;
  const int n = spec.steps_per_frame;
  StepMatrix m;
  m.terminal = n;
  m.window = spec.window;
  if (spec.kind == ScheduleMatrixKind::staircase) {
    const int t_total = (f - 1) * spec.stride + n;
    m.u.resize(t_total, f);
    for (int t = 0; t < t_total; ++t)
      for (int j = 0; j < f; ++j)
        m.u(t, j) = std::clamp(t - j * spec.stride + 1, 0, n);
  } else {
    const int chunks = (f + spec.chunk_size - 1) / spec.chunk_size;
    const int t_total = chunks * n;
    m.u.resize(t_total, f);
    for (int t = 0; t < t_total; ++t)
      for (int j = 0; j < f; ++j) {
        int g = j / spec.chunk_size;
        m.u(t, j) = std::clamp(t - g * n + 1, 0, n);
      }
  }
  return m;
}

const char* schedule_matrix_kind_name(ScheduleMatrixKind kind) {
  return kind == ScheduleMatrixKind::chunk_sync ? "chunk_sync" : "staircase";
}

ScheduleMatrixKind schedule_matrix_kind_from_name(const std::string& name) {
  if (name == "chunk_sync") return ScheduleMatrixKind::chunk_sync;
  if (name == "staircase") return ScheduleMatrixKind::staircase;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

}  // namespace scope
