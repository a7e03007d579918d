#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scope/commands.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::string selective;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "experiment config JSON")->required();
  cmd->add_option("--out", opt.out_dir, "output directory override");
  cmd->add_option("--seeds", opt.seeds, "comma-separated seed list override");
  cmd->add_option("--selective", opt.selective, "selective computation override")
      ->check(CLI::IsMember({"on", "off"}));
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string cell =
        comma == std::string::npos ? text.substr(pos) : text.substr(pos, comma - pos);
    char* end = nullptr;
    const unsigned long long value = std::strtoull(cell.c_str(), &end, 10);
    if (cell.empty() || end == cell.c_str() || *end != '\0')
      throw scope::ConstraintError("bad seed list entry: '" + cell + "'");
    seeds.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

int load_config(const CommonOptions& opt, scope::ExperimentConfig& cfg) {
  try {
    cfg = scope::parse_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.selective.empty()) cfg.selective = opt.selective == "on";
    if (!opt.seeds.empty()) cfg.seeds = parse_seed_list(opt.seeds);
    cfg.validate();
  } catch (const scope::MissingFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return scope::exit_missing_file;
  } catch (const scope::MalformedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return scope::exit_malformed;
  } catch (const scope::ConstraintError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return scope::exit_constraint;
  }
  return scope::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache/predict/recompute control plane over synthetic denoising runs"};
  app.require_subcommand(1);

  CommonOptions run_opt, sweep_common, bounds_opt, compare_opt, replay_opt;
  scope::SweepOptions sweep_opt;
  double l2_override = 0.0;
  std::string trace_path;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate and write report JSON + trace CSV");
  add_common(run_cmd, run_opt);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate a config grid into one CSV");
  add_common(sweep_cmd, sweep_common);
  sweep_cmd->add_option("--grid", sweep_opt.grid, "thresholds|skip|selective")
      ->check(CLI::IsMember({"thresholds", "skip", "selective"}));
  sweep_cmd->add_option("--mode", sweep_opt.mode, "closed|replay")
      ->check(CLI::IsMember({"closed", "replay"}));

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "verify predicted-step drift bounds");
  add_common(bounds_cmd, bounds_opt);
  bounds_cmd->add_option("--l2", l2_override, "curvature bound override (default: analytic)");

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "reuse-vs-predict diagnostic and reduced-step comparison");
  add_common(compare_cmd, compare_opt);

  CLI::App* replay_cmd =
      app.add_subcommand("replay", "open-loop threshold replay of a recorded trace");
  add_common(replay_cmd, replay_opt);
  replay_cmd->add_option("--trace", trace_path, "decision trace CSV from a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return scope::exit_constraint;
  }

  scope::ExperimentConfig cfg;
  if (app.got_subcommand(run_cmd)) {
    if (int rc = load_config(run_opt, cfg)) return rc;
    return scope::cmd_run(cfg, std::cout);
  }
  if (app.got_subcommand(sweep_cmd)) {
    if (int rc = load_config(sweep_common, cfg)) return rc;
    return scope::cmd_sweep(cfg, sweep_opt, std::cout);
  }
  if (app.got_subcommand(bounds_cmd)) {
    if (int rc = load_config(bounds_opt, cfg)) return rc;
    return scope::cmd_bounds(cfg, l2_override, std::cout);
  }
  if (app.got_subcommand(compare_cmd)) {
    if (int rc = load_config(compare_opt, cfg)) return rc;
    return scope::cmd_compare(cfg, std::cout);
  }
  if (int rc = load_config(replay_opt, cfg)) return rc;
  return scope::cmd_replay(cfg, trace_path, std::cout);
}
