#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scope/cost.hpp"
#include "scope/field.hpp"
#include "scope/noise_schedule.hpp"
#include "scope/scheduler.hpp"
#include "scope/step_matrix.hpp"

namespace scope {

// Config failures split into the three classes the CLI maps to exit
// codes: file not readable, document not parseable, and a parseable
// document whose content breaks a constraint.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingFileError : ConfigError {
  using ConfigError::ConfigError;
};
struct MalformedError : ConfigError {
  using ConfigError::ConfigError;
};
struct ConstraintError : ConfigError {
  using ConfigError::ConfigError;
};

struct ExperimentConfig {
  VelocityField field;
  ScheduleSpec spec;
  ScheduleKind noise_kind = ScheduleKind::linear;
  SchedulerConfig scheduler;
  CostModel cost;
  bool selective = false;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "out";

  void validate() const;  // throws ConstraintError naming the offending key
};

// Single JSON document, strict: unknown keys are rejected at every
// level and every sub-config is validated before the config is usable.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Canonical (sorted-key) echo of the run-defining part of the config.
// out_dir and seeds are excluded; seeds appear in output file names.
std::string config_json(const ExperimentConfig& cfg);

// 16 hex digits of FNV-1a over config_json, used to key output files.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace scope
