#pragma once

#include <ostream>
#include <string>

#include "scope/config.hpp"

namespace scope {

// One exit code per documented failure class.
inline constexpr int exit_ok = 0;
inline constexpr int exit_missing_file = 2;
inline constexpr int exit_malformed = 3;
inline constexpr int exit_constraint = 4;
inline constexpr int exit_run_failure = 5;
inline constexpr int exit_invariant = 6;

struct SweepOptions {
  std::string grid = "thresholds";  // thresholds | skip | selective
  std::string mode = "closed";      // closed | replay (thresholds grid only)
};

// Each command writes its files under cfg.out_dir, logs a short
// summary, and returns one of the exit codes above.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, const SweepOptions& opt, std::ostream& log);

// l2_override <= 0 selects the analytic curvature bound of the field.
int cmd_bounds(const ExperimentConfig& cfg, double l2_override, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, std::ostream& log);
int cmd_replay(const ExperimentConfig& cfg, const std::string& trace_path, std::ostream& log);

}  // namespace scope
