#include "scope/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace scope {

BoolArray update_mask(const IntArray& u_t, const IntArray& u_prev, int terminal) {
  if (u_t.size() != u_prev.size()) throw std::invalid_argument("step rows differ in length");
  return u_t != u_prev && u_t != terminal;
}

SlotInterval advance_interval(IntervalState& state, const BoolArray& mask, int window,
                              int num_slots) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
  if (mask.size() != num_slots) throw std::invalid_argument("mask length must equal num_slots");
  int top = -1;
  int active = 0;
  for (int j = 0; j < num_slots; ++j) {
    if (mask[j]) {
      top = j;
      ++active;
    }
  }
  if (top < 0) {
    state.e_bar = std::min(window, num_slots);
  } else {
    state.e_bar = std::max(state.e_bar, top + 1);
  }
  SlotInterval v{std::max(state.e_bar - window, 0), state.e_bar};
  state.history.push_back({static_cast<int>(state.history.size()), v, active});
  return v;
}

int baseline_window(int window, int num_slots) {
  if (window < 1 || num_slots < 1) throw std::invalid_argument("window and num_slots must be >= 1");
  return std::min(window, num_slots);
}

}  // namespace scope
