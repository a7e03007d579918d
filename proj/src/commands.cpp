#include "scope/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "scope/analysis.hpp"
#include "scope/interval.hpp"
#include "scope/simulator.hpp"

namespace scope {

namespace {

const std::vector<std::pair<double, double>>& threshold_grid() {
  static const std::vector<std::pair<double, double>> grid = {
      {0.12, 0.30}, {0.15, 0.36}, {0.18, 0.42}, {0.21, 0.48}, {0.25, 0.55}};
  return grid;
}

const std::vector<int>& skip_grid() {
  static const std::vector<int> grid = {1, 2, 3, 5, 8};
  return grid;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("short write on " + path);
}

NoiseSchedule config_schedule(const ExperimentConfig& cfg) {
  return make_noise_schedule(cfg.noise_kind, cfg.spec.steps_per_frame);
}

struct SweepRow {
  double tau_c = 0.0;
  double tau_p = 0.0;
  int max_skip = 0;
  bool selective = false;
  double cost = 0.0;
  double speedup = 0.0;
  double terminal = 0.0;
  bool has_terminal = true;
  double cost_ratio = 1.0;
  double recompute = 0.0;
  double predict = 0.0;
  double cache = 0.0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "tau_c,tau_p,max_skip,selective,cost,speedup,terminal_error,cost_ratio,"
         "recompute_steps,predict_steps,cache_steps\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.tau_c) << ',' << format_double(r.tau_p) << ',' << r.max_skip << ','
        << (r.selective ? "on" : "off") << ',' << format_double(r.cost) << ','
        << format_double(r.speedup) << ',' << (r.has_terminal ? format_double(r.terminal) : "")
        << ',' << format_double(r.cost_ratio) << ',' << format_double(r.recompute) << ','
        << format_double(r.predict) << ',' << format_double(r.cache) << '\n';
  }
  return out.str();
}

// Mean cost, speedup, and terminal error across the config's seeds for
// one scheduler variant.
SweepRow closed_loop_point(const ExperimentConfig& cfg, const SchedulerConfig& scheduler,
                           bool selective) {
  const NoiseSchedule schedule = config_schedule(cfg);
  SweepRow row;
  row.tau_c = scheduler.tau_c;
  row.tau_p = scheduler.tau_p;
  row.max_skip = scheduler.max_skip;
  row.selective = selective;
  for (std::uint64_t seed : cfg.seeds) {
    RunReport rep =
        run_scope(cfg.field, cfg.spec, schedule, scheduler, cfg.cost, selective, seed);
    RunReport oracle = run_original(cfg.field, cfg.spec, schedule, cfg.cost, seed);
    CostSummary summary = cost_accounting(rep, cfg.cost);
    row.cost += summary.total_cost;
    row.speedup += summary.speedup;
    row.terminal += terminal_error(rep, oracle);
    row.recompute += summary.recompute_steps;
    row.predict += summary.predict_steps;
    row.cache += summary.cache_steps;
  }
  const double n = static_cast<double>(cfg.seeds.size());
  row.cost /= n;
  row.speedup /= n;
  row.terminal /= n;
  row.recompute /= n;
  row.predict /= n;
  row.cache /= n;
  return row;
}

std::vector<double> d_trace_of(const RunReport& rep) {
  std::vector<double> d;
  d.reserve(rep.records.size());
  for (const IterationRecord& rec : rep.records) d.push_back(rec.d);
  return d;
}

// Decision-level pricing for open-loop replays: every decision covers
// one frame slot, plus the per-iteration overhead.
SweepRow replay_point(const ReplayCounts& counts, int trace_len, const CostModel& cost,
                      int max_skip) {
  SweepRow row;
  row.tau_c = counts.tau_c;
  row.tau_p = counts.tau_p;
  row.max_skip = max_skip;
  row.has_terminal = false;
  double acc_r = 0.0, acc_p = 0.0, acc_c = 0.0, acc_ov = 0.0, base = 0.0, base_ov = 0.0;
  for (int i = 0; i < counts.recompute; ++i) acc_r += cost.c_forward;
  for (int i = 0; i < counts.predict; ++i) acc_p += cost.c_predict;
  for (int i = 0; i < counts.cache; ++i) acc_c += cost.c_cache;
  for (int i = 0; i < trace_len; ++i) {
    acc_ov += cost.c_overhead;
    base += cost.c_forward;
    base_ov += cost.c_overhead;
  }
  row.cost = ((acc_r + acc_p) + acc_c) + acc_ov;
  row.speedup = (base + base_ov) / row.cost;
  row.recompute = counts.recompute;
  row.predict = counts.predict;
  row.cache = counts.cache;
  return row;
}

bool recompute_counts_monotone(const std::vector<SweepRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].recompute > rows[i - 1].recompute) return false;
  return true;
}

std::string bounds_csv(const std::vector<std::pair<std::uint64_t, BoundReport>>& reports) {
  std::ostringstream out;
  out << "seed,t,run_length,measured,bound,margin,violation\n";
  for (const auto& [seed, rep] : reports) {
    for (const BoundCheckpoint& cp : rep.checkpoints) {
      out << seed << ',' << cp.t << ',' << cp.run_length << ',' << format_double(cp.measured)
          << ',' << format_double(cp.bound) << ',' << format_double(cp.margin) << ','
          << (cp.measured > cp.bound ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

int reduced_iterations(const ExperimentConfig& cfg, int n) {
  ScheduleSpec spec = cfg.spec;
  spec.steps_per_frame = n;
  return make_step_matrix(spec).iterations();
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  const std::string hash = config_hash(cfg);
  try {
    const NoiseSchedule schedule = config_schedule(cfg);
    for (std::uint64_t seed : cfg.seeds) {
      RunReport rep = run_scope(cfg.field, cfg.spec, schedule, cfg.scheduler, cfg.cost,
                                cfg.selective, seed);
      CostSummary summary;
      try {
        summary = cost_accounting(rep, cfg.cost);
      } catch (const std::logic_error& e) {
        log << "error: " << e.what() << '\n';
        return exit_invariant;
      }
      write_file(cfg.out_dir, "report_" + hash + "_" + std::to_string(seed) + ".json",
                 report_json(rep));
      write_file(cfg.out_dir, "trace_" + hash + "_" + std::to_string(seed) + ".csv",
                 trace_csv(rep));
      log << "run seed=" << seed << " cost=" << format_double(summary.total_cost)
          << " speedup=" << format_double(summary.speedup)
          << " modes=" << summary.recompute_steps << '/' << summary.predict_steps << '/'
          << summary.cache_steps << '\n';
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  log << "wrote report_" << hash << "_<seed>.json and trace_" << hash << "_<seed>.csv to "
      << cfg.out_dir << '\n';
  return exit_ok;
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepOptions& opt, std::ostream& log) {
  if (opt.grid != "thresholds" && opt.grid != "skip" && opt.grid != "selective") {
    log << "error: unknown sweep grid: " << opt.grid << '\n';
    return exit_constraint;
  }
  if (opt.mode != "closed" && opt.mode != "replay") {
    log << "error: unknown sweep mode: " << opt.mode << '\n';
    return exit_constraint;
  }
  if (opt.mode == "replay" && opt.grid != "thresholds") {
    log << "error: replay mode applies to the thresholds grid\n";
    return exit_constraint;
  }
  const std::string hash = config_hash(cfg);
  std::vector<SweepRow> rows;
  try {
    if (opt.grid == "thresholds" && opt.mode == "replay") {
      // One closed-loop run records the discrepancy stream; the grid is
      // then replayed against it with no feedback.
      RunReport rep = run_scope(cfg.field, cfg.spec, config_schedule(cfg), cfg.scheduler,
                                cfg.cost, cfg.selective, cfg.seeds.front());
      const std::vector<double> d = d_trace_of(rep);
      for (const ReplayCounts& counts :
           open_loop_threshold_replay(d, threshold_grid(), cfg.scheduler))
        rows.push_back(
            replay_point(counts, static_cast<int>(d.size()), cfg.cost, cfg.scheduler.max_skip));
    } else if (opt.grid == "thresholds") {
      for (const auto& [tau_c, tau_p] : threshold_grid()) {
        SchedulerConfig scheduler = cfg.scheduler;
        scheduler.tau_c = tau_c;
        scheduler.tau_p = tau_p;
        rows.push_back(closed_loop_point(cfg, scheduler, cfg.selective));
      }
    } else if (opt.grid == "skip") {
      for (int max_skip : skip_grid()) {
        SchedulerConfig scheduler = cfg.scheduler;
        scheduler.max_skip = max_skip;
        rows.push_back(closed_loop_point(cfg, scheduler, cfg.selective));
      }
    } else {
      rows.push_back(closed_loop_point(cfg, cfg.scheduler, false));
      rows.push_back(closed_loop_point(cfg, cfg.scheduler, true));
    }
  } catch (const std::logic_error& e) {
    log << "error: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  for (SweepRow& row : rows) row.cost_ratio = row.cost / rows.front().cost;
  try {
    write_file(cfg.out_dir, "sweep_" + hash + ".csv", sweep_csv(rows));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  log << "wrote sweep_" << hash << ".csv with " << rows.size() << " rows to " << cfg.out_dir
      << '\n';
  if (opt.mode == "replay" && !recompute_counts_monotone(rows)) {
    log << "error: recompute counts increased along the threshold grid\n";
    return exit_invariant;
  }
  return exit_ok;
}

int cmd_bounds(const ExperimentConfig& cfg, double l2_override, std::ostream& log) {
  if (cfg.field.kind == FieldKind::linear_state) {
    log << "error: bounds need a sigma-only field (sin_sigma or poly_sigma)\n";
    return exit_constraint;
  }
  if (cfg.spec.frames != 1) {
    log << "error: bounds need schedule.frames = 1\n";
    return exit_constraint;
  }
  if (cfg.selective) {
    log << "error: bounds need selective off\n";
    return exit_constraint;
  }
  if (cfg.scheduler.predictor_order != TaylorOrder::first) {
    log << "error: bounds cover the first-order predictor\n";
    return exit_constraint;
  }
  if (cfg.scheduler.tau_c != 0.0) {
    log << "error: bounds need tau_c = 0 so no step is served from cache\n";
    return exit_constraint;
  }
  const double l2 = l2_override > 0.0 ? l2_override : sigma_derivative_bound_l2(cfg.field, 2);
  const std::string hash = config_hash(cfg);
  std::vector<std::pair<std::uint64_t, BoundReport>> reports;
  int violations = 0;
  int checkpoints = 0;
  try {
    const NoiseSchedule schedule = config_schedule(cfg);
    for (std::uint64_t seed : cfg.seeds) {
      RunReport rep = run_scope(cfg.field, cfg.spec, schedule, cfg.scheduler, cfg.cost,
                                cfg.selective, seed);
      RunReport oracle = run_original(cfg.field, cfg.spec, schedule, cfg.cost, seed);
      BoundReport bounds = verify_bounds(rep, oracle, l2);
      violations += bounds.violations;
      checkpoints += static_cast<int>(bounds.checkpoints.size());
      reports.emplace_back(seed, std::move(bounds));
    }
    write_file(cfg.out_dir, "bounds_" + hash + ".csv", bounds_csv(reports));
  } catch (const std::logic_error& e) {
    log << "error: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  log << "wrote bounds_" << hash << ".csv: l2=" << format_double(l2) << " checkpoints="
      << checkpoints << " violations=" << violations << '\n';
  return violations == 0 ? exit_ok : exit_invariant;
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  const std::string hash = config_hash(cfg);
  const int n_steps = cfg.spec.steps_per_frame;
  const int order_needed = static_cast<int>(cfg.scheduler.predictor_order) + 1;
  const int warmup = std::max(order_needed, n_steps / 10);
  const int width = std::min(6, n_steps - warmup);
  if (width < 3) {
    log << "error: schedule.steps_per_frame too small for a diagnostic window\n";
    return exit_constraint;
  }
  try {
    const NoiseSchedule schedule = config_schedule(cfg);
    DiagnosticReport diag = reuse_vs_predict_diagnostic(
        cfg.field, schedule, {warmup, warmup + width}, cfg.scheduler.predictor_order);
    std::ostringstream diag_csv;
    diag_csv << "k,sigma,truth_norm,reuse_error,predict_error\n";
    for (const DiagnosticStep& step : diag.steps) {
      diag_csv << step.k << ',' << format_double(step.sigma) << ','
               << format_double(step.truth_norm) << ',' << format_double(step.reuse_error) << ','
               << format_double(step.predict_error) << '\n';
    }
    write_file(cfg.out_dir, "compare_diag_" + hash + ".csv", diag_csv.str());
    log << "diagnostic reuse_mae=" << format_double(diag.reuse_mae)
        << " predict_mae=" << format_double(diag.predict_mae)
        << " ratio=" << format_double(diag.ratio) << '\n';

    std::ostringstream red_csv;
    red_csv << "seed,reduced_n,scope_cost,reduced_cost,scope_error,reduced_error,scope_wins\n";
    int wins = 0;
    for (std::uint64_t seed : cfg.seeds) {
      RunReport rep = run_scope(cfg.field, cfg.spec, schedule, cfg.scheduler, cfg.cost,
                                cfg.selective, seed);
      RunReport oracle = run_original(cfg.field, cfg.spec, schedule, cfg.cost, seed);
      CostSummary summary = cost_accounting(rep, cfg.cost);
      const double budget = summary.total_cost;
      const int window = baseline_window(cfg.spec.window, cfg.spec.frames);
      // Smallest step count whose full-recompute cost covers the scope
      // run's budget, so the reduced run is never underfunded.
      int reduced_n = n_steps;
      for (int n = 1; n <= n_steps; ++n) {
        const double t_n = reduced_iterations(cfg, n);
        if (t_n * (cfg.cost.c_forward * window) + t_n * cfg.cost.c_overhead >= budget) {
          reduced_n = n;
          break;
        }
      }
      RunReport reduced =
          run_reduced_step(cfg.field, cfg.spec, cfg.noise_kind, reduced_n, cfg.cost, seed);
      const double scope_err = terminal_error(rep, oracle);
      const double reduced_err = terminal_error(reduced, oracle);
      const bool win = scope_err < reduced_err;
      wins += win ? 1 : 0;
      red_csv << seed << ',' << reduced_n << ',' << format_double(summary.total_cost) << ','
              << format_double(reduced.total_cost) << ',' << format_double(scope_err) << ','
              << format_double(reduced_err) << ',' << (win ? 1 : 0) << '\n';
    }
    write_file(cfg.out_dir, "compare_reduced_" + hash + ".csv", red_csv.str());
    log << "reduced-step comparison: scope wins " << wins << "/" << cfg.seeds.size() << '\n';
  } catch (const std::logic_error& e) {
    log << "error: " << e.what() << '\n';
    return exit_invariant;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  return exit_ok;
}

int cmd_replay(const ExperimentConfig& cfg, const std::string& trace_path, std::ostream& log) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    log << "error: cannot open trace file: " << trace_path << '\n';
    return exit_missing_file;
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("step_index,sigma,d_k,r_minus,mode", 0) != 0) {
    log << "error: not a decision trace CSV: " << trace_path << '\n';
    return exit_malformed;
  }
  std::vector<double> d_trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t first = line.find(',');
    std::size_t second = first == std::string::npos ? first : line.find(',', first + 1);
    std::size_t third = second == std::string::npos ? second : line.find(',', second + 1);
    if (third == std::string::npos) {
      log << "error: malformed trace row: " << line << '\n';
      return exit_malformed;
    }
    const std::string cell = line.substr(second + 1, third - second - 1);
    char* end = nullptr;
    const double d = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      log << "error: malformed d_k value: " << cell << '\n';
      return exit_malformed;
    }
    d_trace.push_back(d);
  }
  if (d_trace.empty()) {
    log << "error: trace holds no decision rows\n";
    return exit_constraint;
  }
  const std::string hash = config_hash(cfg);
  std::ostringstream csv;
  csv << "tau_c,tau_p,recompute,predict,cache\n";
  std::vector<ReplayCounts> counts =
      open_loop_threshold_replay(d_trace, threshold_grid(), cfg.scheduler);
  for (const ReplayCounts& c : counts) {
    csv << format_double(c.tau_c) << ',' << format_double(c.tau_p) << ',' << c.recompute << ','
        << c.predict << ',' << c.cache << '\n';
  }
  try {
    write_file(cfg.out_dir, "replay_" + hash + ".csv", csv.str());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_run_failure;
  }
  log << "wrote replay_" << hash << ".csv over " << counts.size() << " grid points\n";
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i].recompute > counts[i - 1].recompute) {
      log << "error: recompute counts increased along the threshold grid\n";
      return exit_invariant;
    }
  }
  return exit_ok;
}

}  // namespace scope
