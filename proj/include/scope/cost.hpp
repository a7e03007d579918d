#pragma once

#include <stdexcept>

namespace scope {

// Abstract per-frame work units. A full forward evaluation is the unit;
// the bookkeeping rates below it must stay ordered or the mode choice
// would not trade off anything.
struct CostModel {
  double c_forward = 1.0;
  double c_predict = 0.02;
  double c_cache = 0.005;
  double c_overhead = 0.01;  // per iteration, mode independent

  void validate() const {
    if (!(c_forward > c_predict && c_predict >= c_cache && c_cache >= 0.0))
      throw std::invalid_argument("cost rates must satisfy c_forward > c_predict >= c_cache >= 0");
    if (!(c_overhead >= 0.0)) throw std::invalid_argument("c_overhead must be >= 0");
  }
};

}  // namespace scope
