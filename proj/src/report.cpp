#include "scope/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace scope {

const char* run_policy_name(RunPolicy policy) {
  switch (policy) {
    case RunPolicy::original:
      return "original";
    case RunPolicy::scope:
      return "scope";
    case RunPolicy::reduced:
      return "reduced";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string trace_csv(const RunReport& report) {
  std::ostringstream out;
  out << "step_index,sigma,d_k,r_minus,mode,consecutive_skips,"
         "e_bar,v_begin,v_end,active_count,cost\n";
  for (const auto& rec : report.records) {
    out << rec.t << ',' << format_double(rec.sigma) << ',' << format_double(rec.d) << ','
        << format_double(rec.r_minus) << ',' << mode_name(rec.mode) << ','
        << rec.consecutive_skips << ',' << rec.e_bar << ',' << rec.computed.begin << ','
        << rec.computed.end << ',' << rec.active_count << ',' << format_double(rec.cost) << '\n';
  }
  return out.str();
}

namespace {

using nlohmann::json;

json field_to_json(const VelocityField& f) {
  json j;
  j["kind"] = field_kind_name(f.kind);
  j["dim"] = f.dim;
  switch (f.kind) {
    case FieldKind::poly_sigma:
      j["a"] = std::vector<double>(f.a.begin(), f.a.end());
      j["b"] = std::vector<double>(f.b.begin(), f.b.end());
      j["c"] = std::vector<double>(f.c.begin(), f.c.end());
      break;
    case FieldKind::sin_sigma:
      j["amp"] = f.amp;
      j["omega"] = f.omega;
      break;
    case FieldKind::linear_state:
      j["coupling"] = std::vector<double>(f.coupling.begin(), f.coupling.end());
      j["drift"] = std::vector<double>(f.drift.begin(), f.drift.end());
      break;
  }
  return j;
}

json spec_to_json(const ScheduleSpec& s) {
  json j;
  j["kind"] = schedule_matrix_kind_name(s.kind);
  j["frames"] = s.frames;
  j["window"] = s.window;
  j["steps_per_frame"] = s.steps_per_frame;
  if (s.kind == ScheduleMatrixKind::staircase) j["stride"] = s.stride;
  if (s.kind == ScheduleMatrixKind::chunk_sync) j["chunk_size"] = s.chunk_size;
  return j;
}

json scheduler_to_json(const SchedulerConfig& c) {
  json j;
  j["tau_c"] = c.tau_c;
  j["tau_p"] = c.tau_p;
  j["lambda"] = c.lambda;
  j["max_skip"] = c.max_skip;
  j["predictor_order"] = order_name(c.predictor_order);
  j["clip_kappa"] = c.clip_kappa;
  j["epsilon"] = c.epsilon;
  return j;
}

}  // namespace

std::string report_json(const RunReport& report) {
  json j;
  j["schema_version"] = 1;
  j["policy"] = run_policy_name(report.policy);
  j["seed"] = report.seed;
  j["field"] = field_to_json(report.field);
  j["schedule"] = spec_to_json(report.spec);
  j["noise"] = {{"kind", schedule_kind_name(report.noise_kind)}, {"steps", report.noise_steps}};
  if (report.policy == RunPolicy::scope) {
    j["scheduler"] = scheduler_to_json(report.scheduler);
    j["selective"] = report.selective;
  }
  j["cost_model"] = {{"c_forward", report.cost_model.c_forward},
                     {"c_predict", report.cost_model.c_predict},
                     {"c_cache", report.cost_model.c_cache},
                     {"c_overhead", report.cost_model.c_overhead}};
  j["iterations"] = report.iterations;
  j["total_cost"] = report.total_cost;
  j["cost_breakdown"] = {{"recompute", report.cost_recompute},
                         {"predict", report.cost_predict},
                         {"cache", report.cost_cache},
                         {"overhead", report.cost_overhead}};
  j["mode_counts"] = {{"recompute", report.recompute_steps},
                      {"predict", report.predict_steps},
                      {"cache", report.cache_steps}};
  json recs = json::array();
  for (const auto& rec : report.records) {
    json r;
    r["t"] = rec.t;
    r["mode"] = mode_name(rec.mode);
    r["v_begin"] = rec.computed.begin;
    r["v_end"] = rec.computed.end;
    r["e_bar"] = rec.e_bar;
    r["active_count"] = rec.active_count;
    r["d"] = rec.d;
    r["r_minus"] = rec.r_minus;
    r["consecutive_skips"] = rec.consecutive_skips;
    r["sigma"] = rec.sigma;
    r["cost"] = rec.cost;
    r["advanced"] = rec.advanced;
    r["frame_sigma"] = rec.frame_sigma;
    r["predicted_frames"] = rec.predicted_frames;
    r["clipped_frames"] = rec.clipped_frames;
    r["fallback_frames"] = rec.fallback_frames;
    recs.push_back(std::move(r));
  }
  j["records"] = std::move(recs);
  json latents = json::array();
  for (const auto& x : report.terminal_latents)
    latents.push_back(std::vector<double>(x.begin(), x.end()));
  j["terminal_latents"] = std::move(latents);
  return j.dump(2) + "\n";
}

}  // namespace scope
