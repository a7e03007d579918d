#pragma once

#include <vector>

#include "scope/types.hpp"

namespace scope {

// Half-open frame interval [begin, end).
struct SlotInterval {
  int begin = 0;
  int end = 0;
  int width() const { return end - begin; }
  bool contains(int j) const { return j >= begin && j < end; }
};

struct IntervalRecord {
  int t = 0;
  SlotInterval v;
  int active_count = 0;
};

// Running end of the active window plus the per-iteration trail for
// reporting. e_bar stays in [0, num_slots].
struct IntervalState {
  int e_bar = 0;
  std::vector<IntervalRecord> history;
};

// mask[j] = (u_t[j] != u_prev[j]) && (u_t[j] != terminal). Slots that
// arrive at the terminal step this iteration drop out of the mask.
BoolArray update_mask(const IntArray& u_t, const IntArray& u_prev, int terminal);

// Window update:
//   all-false mask: e_bar is assigned min(window, num_slots) (not maxed)
//   otherwise:      e_bar = max(e_bar, 1 + highest masked slot)
// and the emitted interval is [max(e_bar - window, 0), e_bar).
SlotInterval advance_interval(IntervalState& state, const BoolArray& mask, int window,
                              int num_slots);

// Uniform window length used when selective computation is off.
int baseline_window(int window, int num_slots);

}  // namespace scope
