#pragma once

#include <string>

#include "scope/types.hpp"

namespace scope {

enum class ScheduleMatrixKind { chunk_sync, staircase };

// Geometry of one autoregressive segment: which frames exist, how wide
// the processing window is, and how per-frame step counts advance.
struct ScheduleSpec {
  ScheduleMatrixKind kind = ScheduleMatrixKind::staircase;
  int frames = 1;           // slots in the segment
  int window = 1;           // processing window bound
  int steps_per_frame = 1;  // denoising steps each frame takes
  int stride = 1;           // staircase: iterations between frame starts
  int chunk_size = 1;       // chunk_sync: frames advancing together

  void validate() const;
};

// Per-iteration frame progress, one row per iteration, one column per
// frame. Entries count completed denoising steps, are non-decreasing
// down each column, advance by at most one per iteration, and every
// column ends at steps_per_frame.
struct StepMatrix {
  Eigen::MatrixXi u;
  int terminal = 0;  // steps_per_frame
  int window = 0;

  int iterations() const { return static_cast<int>(u.rows()); }
  int slots() const { return static_cast<int>(u.cols()); }
  IntArray row(int t) const { return u.row(t).transpose().array(); }
};

// staircase: frame j takes its first step at iteration j*stride, then
// one step per iteration. chunk_sync: frames of chunk g advance
// together, one step per iteration, starting at iteration
// g*steps_per_frame.
StepMatrix make_step_matrix(const ScheduleSpec& spec);

const char* schedule_matrix_kind_name(ScheduleMatrixKind kind);
ScheduleMatrixKind schedule_matrix_kind_from_name(const std::string& name);

}  // namespace scope
