#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "scope/analysis.hpp"
#include "scope/rng.hpp"
#include "scope/simulator.hpp"

using namespace scope;

namespace {

ScheduleSpec staircase(int frames, int window, int steps, int stride) {
  ScheduleSpec s;
  s.kind = ScheduleMatrixKind::staircase;
  s.frames = frames;
  s.window = window;
  s.steps_per_frame = steps;
  s.stride = stride;
  return s;
}

ScheduleSpec chunked(int frames, int window, int steps, int chunk) {
  ScheduleSpec s;
  s.kind = ScheduleMatrixKind::chunk_sync;
  s.frames = frames;
  s.window = window;
  s.steps_per_frame = steps;
  s.chunk_size = chunk;
  return s;
}

VelocityField const_poly(int dim, double value) {
  return make_poly_field(Vector::Constant(dim, value), Vector::Zero(dim), Vector::Zero(dim));
}

}  // namespace

TEST_CASE("schedule specs reject degenerate geometry") {
  CHECK_THROWS_AS(staircase(0, 1, 1, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(staircase(1, 0, 1, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(staircase(1, 1, 0, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(staircase(1, 1, 1, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(chunked(2, 1, 1, 0).validate(), std::invalid_argument);
  CHECK_NOTHROW(staircase(3, 2, 2, 1).validate());
}

TEST_CASE("staircase step matrix advances one frame per stride") {
  StepMatrix m = make_step_matrix(staircase(3, 2, 2, 1));
  REQUIRE(m.iterations() == 4);
  REQUIRE(m.slots() == 3);
  CHECK(m.terminal == 2);
  const int expected[4][3] = {{1, 0, 0}, {2, 1, 0}, {2, 2, 1}, {2, 2, 2}};
  for (int t = 0; t < 4; ++t)
    for (int j = 0; j < 3; ++j) CHECK(m.u(t, j) == expected[t][j]);
}

TEST_CASE("chunked step matrix advances whole chunks in lockstep") {
  StepMatrix m = make_step_matrix(chunked(2, 2, 2, 2));
  REQUIRE(m.iterations() == 2);
  CHECK(m.u(0, 0) == 1);
  CHECK(m.u(0, 1) == 1);
  CHECK(m.u(1, 0) == 2);
  CHECK(m.u(1, 1) == 2);

  // A partial trailing chunk still runs after the full ones finish.
  StepMatrix p = make_step_matrix(chunked(3, 2, 2, 2));
  REQUIRE(p.iterations() == 4);
  const int expected[4][3] = {{1, 1, 0}, {2, 2, 0}, {2, 2, 1}, {2, 2, 2}};
  for (int t = 0; t < 4; ++t)
    for (int j = 0; j < 3; ++j) CHECK(p.u(t, j) == expected[t][j]);
}

TEST_CASE("single-frame staircase is fully sequential") {
  StepMatrix m = make_step_matrix(staircase(1, 1, 4, 3));
  REQUIRE(m.iterations() == 4);
  for (int t = 0; t < 4; ++t) CHECK(m.u(t, 0) == t + 1);
}

TEST_CASE("random step matrices satisfy the progress invariants") {
  Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    ScheduleSpec spec = rng.next_int(0, 1) == 0
                            ? staircase(rng.next_int(1, 8), 1, rng.next_int(1, 6), rng.next_int(1, 4))
                            : chunked(rng.next_int(1, 8), 1, rng.next_int(1, 6), rng.next_int(1, 9));
    CAPTURE(trial);
    StepMatrix m = make_step_matrix(spec);
    bool ok = true;
    for (int j = 0; j < m.slots(); ++j) {
      int prev = 0;
      for (int t = 0; t < m.iterations(); ++t) {
        int u = m.u(t, j);
        ok = ok && u >= 0 && u <= m.terminal && u >= prev && u - prev <= 1;
        prev = u;
      }
      ok = ok && prev == m.terminal;
    }
    CHECK(ok);
  }
}

TEST_CASE("field evaluation matches the closed forms") {
  Vector x = Vector::Zero(3);
  auto ones = const_poly(3, 1.0);
  CHECK((eval_field(ones, x, 0.3) - Vector::Constant(3, 1.0)).norm() == 0.0);

  auto slope = make_poly_field(Vector::Zero(2), Vector::Constant(2, 2.0), Vector::Zero(2));
  Velocity v = eval_field(slope, Vector::Zero(2), 0.7);
  CHECK(std::abs(v[0] - 1.4) <= 1e-15);
  CHECK(v[0] == v[1]);

  auto mixed = make_poly_field((Vector(2) << 1.0, 0.0).finished(),
                               (Vector(2) << 0.0, 2.0).finished(),
                               (Vector(2) << 0.0, 1.0).finished());
  v = eval_field(mixed, Vector::Zero(2), 0.5);
  CHECK(v[0] == 1.0);
  CHECK(std::abs(v[1] - 1.25) <= 1e-15);

  auto sine = make_sin_field(4, 1.0, M_PI);
  v = eval_field(sine, Vector::Zero(4), 0.5);
  CHECK(std::abs(v[0] - 1.0) <= 1e-12);
  CHECK(v[0] == v[3]);

  auto coupled = make_linear_state_field((Vector(2) << 2.0, -1.0).finished(),
                                         (Vector(2) << 0.5, 0.0).finished());
  v = eval_field(coupled, (Vector(2) << 1.0, 3.0).finished(), 0.9);
  CHECK(v[0] == 2.5);
  CHECK(v[1] == -3.0);
  CHECK_THROWS_AS(eval_field(coupled, Vector::Zero(3), 0.9), std::invalid_argument);
}

TEST_CASE("field validation rejects malformed parameters") {
  CHECK_THROWS_AS(make_sin_field(4, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_sin_field(0, 1.0, 1.0), std::invalid_argument);
  VelocityField f = const_poly(3, 1.0);
  f.b = Vector::Zero(2);
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_linear_state_field(Vector::Zero(2), Vector::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(field_kind_from_name("cubic"), std::invalid_argument);
  CHECK(field_kind_from_name(field_kind_name(FieldKind::linear_state)) ==
        FieldKind::linear_state);
}

TEST_CASE("sigma derivative bounds match hand calculus") {
  auto sine = make_sin_field(4, 1.5, 2.0);
  CHECK(sigma_derivative_bound(sine, 1) == 3.0);
  CHECK(sigma_derivative_bound(sine, 2) == 6.0);
  CHECK(sigma_derivative_bound_l2(sine, 2) == 2.0 * 6.0);  // sqrt(4) * amp * omega^2

  auto quad = make_poly_field(Vector::Zero(2), (Vector(2) << 1.0, -1.0).finished(),
                              (Vector(2) << 3.0, 0.5).finished());
  // v' = b + 2c*sigma peaks at an endpoint of [0, 1].
  CHECK(sigma_derivative_bound(quad, 1) == 7.0);
  CHECK(sigma_derivative_bound(quad, 2) == 6.0);
  CHECK(sigma_derivative_bound(quad, 3) == 0.0);
  CHECK(std::abs(sigma_derivative_bound_l2(quad, 2) -
                 2.0 * std::sqrt(9.0 + 0.25)) <= 1e-15);

  auto coupled = make_linear_state_field(Vector::Ones(2), Vector::Zero(2));
  CHECK_THROWS_AS(sigma_derivative_bound(coupled, 2), std::invalid_argument);
  CHECK_THROWS_AS(sigma_derivative_bound(sine, 0), std::invalid_argument);
}

TEST_CASE("euler steps move along the velocity") {
  Vector x = Vector::Constant(1, 1.0);
  Vector v = Vector::Constant(1, 2.0);
  CHECK(std::abs(euler_step(x, v, -0.1)[0] - 0.8) <= 1e-15);
  CHECK(euler_step(x, v, 0.0)[0] == 1.0);
  CHECK(euler_step(x, Vector::Zero(1), -0.5)[0] == 1.0);
  CHECK_THROWS_AS(euler_step(x, Vector::Zero(2), -0.1), std::invalid_argument);
}

TEST_CASE("zero velocity keeps the initial noise sample") {
  auto field = const_poly(5, 0.0);
  auto spec = staircase(1, 1, 4, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 4);
  RunReport r = run_original(field, spec, schedule, CostModel{}, 77);
  Vector initial = Rng(77).normal_vector(5);
  CHECK((r.terminal_latents.at(0) - initial).norm() == 0.0);
}

TEST_CASE("constant unit velocity telescopes to initial minus one") {
  auto field = const_poly(3, 1.0);
  auto spec = staircase(1, 1, 4, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 4);
  RunReport r = run_original(field, spec, schedule, CostModel{}, 5);
  REQUIRE(r.iterations == 4);
  Vector expect = Rng(5).normal_vector(3) - Vector::Ones(3);
  CHECK((r.terminal_latents.at(0) - expect).norm() <= 1e-12);
  CHECK(std::abs(r.total_cost - 4.04) <= 1e-12);
  CHECK(r.recompute_steps == 4);
  CHECK(r.predict_steps == 0);

  // Every iteration prices the full window plus overhead.
  for (const auto& rec : r.records) {
    CHECK(rec.mode == Mode::recompute);
    CHECK(rec.computed.width() == 1);
    CHECK(rec.cost == 1.0 * 1 + 0.01);
  }
}

TEST_CASE("all-recompute thresholds reproduce the original run bit for bit") {
  SchedulerConfig degenerate;
  degenerate.tau_c = 0.0;
  degenerate.tau_p = 0.0;
  CostModel cost;

  struct Case {
    VelocityField field;
    ScheduleSpec spec;
  };
  const Case cases[] = {
      {make_sin_field(6, 1.0, M_PI), staircase(3, 3, 3, 1)},
      {const_poly(4, 1.0), chunked(4, 4, 2, 2)},
      {make_linear_state_field(Vector::Constant(3, -0.5), Vector::Constant(3, 0.1)),
       staircase(4, 4, 2, 2)},
  };
  for (const auto& c : cases) {
    auto schedule = make_noise_schedule(ScheduleKind::linear, c.spec.steps_per_frame);
    RunReport orig = run_original(c.field, c.spec, schedule, cost, 42);
    RunReport scoped = run_scope(c.field, c.spec, schedule, degenerate, cost, false, 42);
    REQUIRE(orig.terminal_latents.size() == scoped.terminal_latents.size());
    for (std::size_t j = 0; j < orig.terminal_latents.size(); ++j)
      CHECK((orig.terminal_latents[j] - scoped.terminal_latents[j]).norm() == 0.0);
    CHECK(orig.total_cost == scoped.total_cost);
    CHECK(scoped.cache_steps == 0);
    CHECK(scoped.predict_steps == 0);
    CHECK(cost_accounting(scoped, cost).speedup == 1.0);
  }
}

TEST_CASE("identical runs serialize identically") {
  auto field = make_sin_field(4, 1.0, M_PI);
  auto spec = staircase(3, 3, 3, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 3);
  auto cfg = SchedulerConfig::skyreels_like();
  RunReport a = run_scope(field, spec, schedule, cfg, CostModel{}, false, 9);
  RunReport b = run_scope(field, spec, schedule, cfg, CostModel{}, false, 9);
  CHECK(report_json(a) == report_json(b));
  CHECK(trace_csv(a) == trace_csv(b));
}

TEST_CASE("predictions on a linear velocity track the oracle") {
  auto field = make_poly_field(Vector::Constant(3, 1.0), Vector::Constant(3, 2.0),
                               Vector::Zero(3));
  auto spec = staircase(1, 1, 10, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 10);
  SchedulerConfig cfg;
  cfg.tau_c = 0.0;  // never cache
  cfg.tau_p = 1e6;  // always willing to predict
  cfg.predictor_order = TaylorOrder::first;
  cfg.clip_kappa = 1e6;
  CostModel cost;

  RunReport orig = run_original(field, spec, schedule, cost, 3);
  RunReport scoped = run_scope(field, spec, schedule, cfg, cost, false, 3);
  CHECK(scoped.predict_steps >= 5);
  CHECK(scoped.cache_steps == 0);
  CHECK(terminal_error(scoped, orig) <= 1e-9);
  CHECK(scoped.total_cost < orig.total_cost);
  for (const auto& rec : scoped.records) {
    if (rec.mode != Mode::predict) continue;
    CHECK(rec.predicted_frames == 1);
    CHECK(rec.clipped_frames == 0);
    CHECK(rec.fallback_frames == 0);
  }
}

TEST_CASE("selective windows shrink cost without touching the sigma path") {
  auto field = make_sin_field(4, 1.0, M_PI);
  auto spec = staircase(6, 4, 2, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 2);
  SchedulerConfig degenerate;
  degenerate.tau_c = 0.0;
  degenerate.tau_p = 0.0;
  CostModel cost;

  RunReport off = run_scope(field, spec, schedule, degenerate, cost, false, 11);
  RunReport on = run_scope(field, spec, schedule, degenerate, cost, true, 11);
  RunReport orig = run_original(field, spec, schedule, cost, 11);
  REQUIRE(off.records.size() == on.records.size());
  for (std::size_t t = 0; t < on.records.size(); ++t) {
    REQUIRE(on.records[t].frame_sigma == off.records[t].frame_sigma);
    REQUIRE(on.records[t].frame_sigma == orig.records[t].frame_sigma);
    CHECK(on.records[t].computed.width() <= baseline_window(spec.window, spec.frames));
  }
  CHECK(on.total_cost < off.total_cost);

  // Hand tally of the seven selective window widths: 1+2+3+4+4+4+4.
  CHECK(std::abs(on.total_cost - (22.0 + 7 * 0.01)) <= 1e-12);
  CHECK(std::abs(off.total_cost - (28.0 + 7 * 0.01)) <= 1e-12);
}

TEST_CASE("reduced-step runs rebuild the schedule") {
  auto field = const_poly(3, 1.0);
  auto spec = staircase(1, 1, 4, 1);
  auto schedule = make_noise_schedule(ScheduleKind::linear, 4);
  CostModel cost;

  RunReport full = run_reduced_step(field, spec, ScheduleKind::linear, 4, cost, 13);
  RunReport orig = run_original(field, spec, schedule, cost, 13);
  CHECK(full.policy == RunPolicy::reduced);
  CHECK((full.terminal_latents.at(0) - orig.terminal_latents.at(0)).norm() == 0.0);
  CHECK(full.total_cost == orig.total_cost);

  RunReport one = run_reduced_step(field, spec, ScheduleKind::linear, 1, cost, 13);
  CHECK(one.iterations == 1);
  Vector expect = Rng(13).normal_vector(3) - Vector::Ones(3);
  CHECK((one.terminal_latents.at(0) - expect).norm() <= 1e-12);

  CHECK_THROWS_AS(run_reduced_step(field, spec, ScheduleKind::linear, 0, cost, 13),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_reduced_step(field, spec, ScheduleKind::linear, 5, cost, 13),
                  std::invalid_argument);
}

TEST_CASE("runs reject inconsistent schedules and windows") {
  auto field = const_poly(2, 1.0);
  CostModel cost;

  // Window too narrow: frame 0 still advances when the window has moved on.
  CHECK_THROWS_AS(run_original(field, staircase(3, 1, 2, 1),
                               make_noise_schedule(ScheduleKind::linear, 2), cost, 1),
                  std::invalid_argument);

  // Schedule table and per-frame step count must agree.
  CHECK_THROWS_AS(run_original(field, staircase(1, 1, 4, 1),
                               make_noise_schedule(ScheduleKind::linear, 5), cost, 1),
                  std::invalid_argument);

  // Selective windows need at least two steps per frame.
  SchedulerConfig cfg = SchedulerConfig::skyreels_like();
  CHECK_THROWS_AS(run_scope(field, staircase(2, 2, 1, 1),
                            make_noise_schedule(ScheduleKind::linear, 1), cfg, cost, true, 1),
                  std::invalid_argument);

  // A chunk wider than the window leaves its low frames with no velocity.
  CHECK_THROWS_AS(run_scope(field, chunked(2, 1, 2, 2),
                            make_noise_schedule(ScheduleKind::linear, 2), cfg, cost, true, 1),
                  std::invalid_argument);
}
