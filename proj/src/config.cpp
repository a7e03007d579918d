#include "scope/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace scope {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConstraintError("unknown key " + where + "." + it.key());
  }
}

const json* find(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConstraintError(where + " must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConstraintError(where + " must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConstraintError(where + " must be a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConstraintError(where + " must be a boolean");
  return j.get<bool>();
}

// Scalars broadcast across every dimension; arrays must match dim.
Vector get_coefficients(const json& j, const std::string& where, int dim) {
  if (j.is_number()) return Vector::Constant(dim, j.get<double>());
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != dim)
      throw ConstraintError(where + " must have one entry per dimension");
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
      if (!j[i].is_number()) throw ConstraintError(where + " entries must be numbers");
      v[i] = j[i].get<double>();
    }
    return v;
  }
  throw ConstraintError(where + " must be a number or an array");
}

VelocityField parse_field(const json& j) {
  if (!j.is_object()) throw ConstraintError("field must be an object");
  const json* kind_j = find(j, "kind");
  if (!kind_j) throw ConstraintError("field.kind is required");
  VelocityField f;
  try {
    f.kind = field_kind_from_name(get_string(*kind_j, "field.kind"));
  } catch (const std::invalid_argument& e) {
    throw ConstraintError(std::string("field.kind: ") + e.what());
  }
  if (const json* d = find(j, "dim")) f.dim = get_int(*d, "field.dim");
  if (f.dim < 1) throw ConstraintError("field.dim must be >= 1");
  switch (f.kind) {
    case FieldKind::poly_sigma: {
      check_keys(j, "field", {"kind", "dim", "a", "b", "c"});
      f.a = Vector::Zero(f.dim);
      f.b = Vector::Zero(f.dim);
      f.c = Vector::Zero(f.dim);
      if (const json* v = find(j, "a")) f.a = get_coefficients(*v, "field.a", f.dim);
      if (const json* v = find(j, "b")) f.b = get_coefficients(*v, "field.b", f.dim);
      if (const json* v = find(j, "c")) f.c = get_coefficients(*v, "field.c", f.dim);
      break;
    }
    case FieldKind::sin_sigma: {
      check_keys(j, "field", {"kind", "dim", "amp", "omega"});
      if (const json* v = find(j, "amp")) f.amp = get_number(*v, "field.amp");
      if (const json* v = find(j, "omega")) f.omega = get_number(*v, "field.omega");
      break;
    }
    case FieldKind::linear_state: {
      check_keys(j, "field", {"kind", "dim", "coupling", "drift"});
      f.coupling = Vector::Zero(f.dim);
      f.drift = Vector::Zero(f.dim);
      if (const json* v = find(j, "coupling"))
        f.coupling = get_coefficients(*v, "field.coupling", f.dim);
      if (const json* v = find(j, "drift")) f.drift = get_coefficients(*v, "field.drift", f.dim);
      break;
    }
  }
  return f;
}

ScheduleSpec parse_schedule(const json& j) {
  if (!j.is_object()) throw ConstraintError("schedule must be an object");
  ScheduleSpec s;
  if (const json* v = find(j, "kind")) {
    try {
      s.kind = schedule_matrix_kind_from_name(get_string(*v, "schedule.kind"));
    } catch (const std::invalid_argument& e) {
      throw ConstraintError(std::string("schedule.kind: ") + e.what());
    }
  }
  std::set<std::string> allowed = {"kind", "frames", "window", "steps_per_frame"};
  allowed.insert(s.kind == ScheduleMatrixKind::staircase ? "stride" : "chunk_size");
  check_keys(j, "schedule", allowed);
  if (const json* v = find(j, "frames")) s.frames = get_int(*v, "schedule.frames");
  if (const json* v = find(j, "window")) s.window = get_int(*v, "schedule.window");
  if (const json* v = find(j, "steps_per_frame"))
    s.steps_per_frame = get_int(*v, "schedule.steps_per_frame");
  if (const json* v = find(j, "stride")) s.stride = get_int(*v, "schedule.stride");
  if (const json* v = find(j, "chunk_size")) s.chunk_size = get_int(*v, "schedule.chunk_size");
  return s;
}

SchedulerConfig parse_scheduler(const json& j) {
  if (!j.is_object()) throw ConstraintError("scheduler must be an object");
  check_keys(j, "scheduler",
             {"tau_c", "tau_p", "lambda", "max_skip", "predictor_order", "clip_kappa", "epsilon"});
  SchedulerConfig c;
  if (const json* v = find(j, "tau_c")) c.tau_c = get_number(*v, "scheduler.tau_c");
  if (const json* v = find(j, "tau_p")) c.tau_p = get_number(*v, "scheduler.tau_p");
  if (const json* v = find(j, "lambda")) c.lambda = get_number(*v, "scheduler.lambda");
  if (const json* v = find(j, "max_skip")) c.max_skip = get_int(*v, "scheduler.max_skip");
  if (const json* v = find(j, "predictor_order")) {
    try {
      c.predictor_order = order_from_name(get_string(*v, "scheduler.predictor_order"));
    } catch (const std::invalid_argument& e) {
      throw ConstraintError(std::string("scheduler.predictor_order: ") + e.what());
    }
  }
  if (const json* v = find(j, "clip_kappa")) c.clip_kappa = get_number(*v, "scheduler.clip_kappa");
  if (const json* v = find(j, "epsilon")) c.epsilon = get_number(*v, "scheduler.epsilon");
  return c;
}

CostModel parse_cost(const json& j) {
  if (!j.is_object()) throw ConstraintError("cost must be an object");
  check_keys(j, "cost", {"c_forward", "c_predict", "c_cache", "c_overhead"});
  CostModel c;
  if (const json* v = find(j, "c_forward")) c.c_forward = get_number(*v, "cost.c_forward");
  if (const json* v = find(j, "c_predict")) c.c_predict = get_number(*v, "cost.c_predict");
  if (const json* v = find(j, "c_cache")) c.c_cache = get_number(*v, "cost.c_cache");
  if (const json* v = find(j, "c_overhead")) c.c_overhead = get_number(*v, "cost.c_overhead");
  return c;
}

json field_json(const VelocityField& f) {
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

}  // namespace

void ExperimentConfig::validate() const {
  try {
    field.validate();
    spec.validate();
    scheduler.validate();
    cost.validate();
  } catch (const std::invalid_argument& e) {
    throw ConstraintError(e.what());
  }
  if (selective && spec.steps_per_frame < 2)
    throw ConstraintError("selective computation needs schedule.steps_per_frame >= 2");
  if (seeds.empty()) throw ConstraintError("seeds must not be empty");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedError(e.what());
  }
  if (!j.is_object()) throw MalformedError("config document must be a JSON object");

  check_keys(j, "config",
             {"field", "schedule", "noise", "scheduler", "cost", "selective", "seeds", "out_dir"});
  ExperimentConfig cfg;
  const json* field_j = find(j, "field");
  if (!field_j) throw ConstraintError("field is required");
  cfg.field = parse_field(*field_j);
  const json* sched_j = find(j, "schedule");
  if (!sched_j) throw ConstraintError("schedule is required");
  cfg.spec = parse_schedule(*sched_j);
  if (const json* v = find(j, "noise")) {
    if (!v->is_object()) throw ConstraintError("noise must be an object");
    check_keys(*v, "noise", {"kind"});
    if (const json* k = find(*v, "kind")) {
      try {
        cfg.noise_kind = schedule_kind_from_name(get_string(*k, "noise.kind"));
      } catch (const std::invalid_argument& e) {
        throw ConstraintError(std::string("noise.kind: ") + e.what());
      }
    }
  }
  if (const json* v = find(j, "scheduler")) cfg.scheduler = parse_scheduler(*v);
  if (const json* v = find(j, "cost")) cfg.cost = parse_cost(*v);
  if (const json* v = find(j, "selective")) cfg.selective = get_bool(*v, "selective");
  if (const json* v = find(j, "seeds")) {
    if (!v->is_array() || v->empty()) throw ConstraintError("seeds must be a non-empty array");
    cfg.seeds.clear();
    for (const auto& s : *v) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
        throw ConstraintError("seeds entries must be non-negative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (const json* v = find(j, "out_dir")) cfg.out_dir = get_string(*v, "out_dir");
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_json(const ExperimentConfig& cfg) {
  json j;
  j["field"] = field_json(cfg.field);
  json s;
  s["kind"] = schedule_matrix_kind_name(cfg.spec.kind);
  s["frames"] = cfg.spec.frames;
  s["window"] = cfg.spec.window;
  s["steps_per_frame"] = cfg.spec.steps_per_frame;
  if (cfg.spec.kind == ScheduleMatrixKind::staircase) s["stride"] = cfg.spec.stride;
  if (cfg.spec.kind == ScheduleMatrixKind::chunk_sync) s["chunk_size"] = cfg.spec.chunk_size;
  j["schedule"] = std::move(s);
  j["noise"] = {{"kind", schedule_kind_name(cfg.noise_kind)}};
  j["scheduler"] = {{"tau_c", cfg.scheduler.tau_c},
                    {"tau_p", cfg.scheduler.tau_p},
                    {"lambda", cfg.scheduler.lambda},
                    {"max_skip", cfg.scheduler.max_skip},
                    {"predictor_order", order_name(cfg.scheduler.predictor_order)},
                    {"clip_kappa", cfg.scheduler.clip_kappa},
                    {"epsilon", cfg.scheduler.epsilon}};
  j["cost"] = {{"c_forward", cfg.cost.c_forward},
               {"c_predict", cfg.cost.c_predict},
               {"c_cache", cfg.cost.c_cache},
               {"c_overhead", cfg.cost.c_overhead}};
  j["selective"] = cfg.selective;
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = config_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace scope
