#include <cmath>
#include <sstream>

#include "doctest.h"
#include "exosc/ode.hpp"
#include "exosc/singular.hpp"
#include "oracles.hpp"

using namespace exosc;

namespace {

FieldValue rotation(State2 s) { return {s.y, -s.x}; }

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rtol = 1e-12;
  c.atol = 1e-14;
  return c;
}

}  // namespace

TEST_CASE("harmonic oscillator returns after one period") {
  const Trajectory tr = integrate(rotation, {1, 0}, 0.0, 2 * M_PI, tight());
  const State2 s = tr.final_state();
  CHECK(std::hypot(s.x - 1.0, s.y) < 1e-8);
  CHECK(tr.final_time() == 2 * M_PI);
}

TEST_CASE("linear focus event gives the closed-form drop point") {
  const double g = 0.3;
  const JumpPoint jp = hester_jump_point(HesterParams(0.5, 0.4, 0.2, g));
  auto lower = [g](State2 s) { return FieldValue{s.y, -s.x - 2 * g * s.y}; };
  EventSpec ev{"y0", [](State2 s) { return s.y; }, Direction::Rising, true};
  const Trajectory tr = integrate(lower, {jp.x_j, 0.0}, 0.0, 100.0, tight(), {ev});
  REQUIRE(tr.stopped_by_event);
  REQUIRE(tr.events.size() == 1);
  const double closed = -jp.x_j * std::exp(-g * M_PI / std::sqrt(1 - g * g));
  CHECK(std::abs(tr.events[0].state.x - closed) < 1e-8);
  CHECK(std::abs(tr.events[0].state.x + 0.5515942295) < 1e-8);
}

TEST_CASE("terminal event at unit speed") {
  EventSpec ev{"x0", [](State2 s) { return s.x; }, Direction::Any, true};
  const Trajectory tr = integrate([](State2) { return FieldValue{1, 0}; }, {-1, 0}, 0.0, 10.0, tight(), {ev});
  REQUIRE(tr.events.size() == 1);
  CHECK(std::abs(tr.events[0].t - 1.0) <= 1e-12);
  CHECK(tr.stopped_by_event);
}

TEST_CASE("flow map examples") {
  IntegratorConfig c = tight();
  const State2 a = flow_map([](State2) { return FieldValue{0, 0}; }, {0.3, -0.7}, 5.0, c);
  CHECK(a.x == 0.3);
  CHECK(a.y == -0.7);
  const State2 b = flow_map(rotation, {0, 1}, M_PI / 2, c);
  CHECK(std::hypot(b.x - 1, b.y) < 1e-9);

  const SystemParams sp = SystemParams::hester(HesterParams(0.5, 0.4, 0.2, 0.3));
  IntegratorConfig hc;
  hc.h_max = default_h_max(0.1);
  const State2 s0{0.32 + 1e-3, 0};
  const State2 s5 = flow_map([&](State2 s) { return field_normalized(sp, 0.1, s); }, s0, 5.0, hc);
  CHECK(std::hypot(s5.x - 0.32, s5.y) > std::hypot(s0.x - 0.32, s0.y));
}

TEST_CASE("configuration validation") {
  IntegratorConfig c;
  c.rtol = -1;
  CHECK_THROWS_AS(integrate(rotation, {1, 0}, 0, 1, c), Error);
  CHECK_THROWS_AS(integrate(rotation, {1, 0}, 0, 0, IntegratorConfig{}), Error);
  CHECK_THROWS_AS(integrate(rotation, {NAN, 0}, 0, 1, IntegratorConfig{}), Error);
  IntegratorConfig few;
  few.max_steps = 3;
  try {
    integrate(rotation, {1, 0}, 0, 1000, few);
    FAIL("expected MaxStepsExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MaxStepsExceeded);
  }
}

TEST_CASE("property: order of the pair") {
  // Fixed step: tolerances so loose that no step is rejected, h_init = h_max.
  auto err_at = [](double h) {
    IntegratorConfig c;
    c.rtol = 1e6;
    c.atol = 1e6;
    c.h_init = h;
    c.h_max = h;
    const State2 s = integrate(rotation, {1, 0}, 0, 2 * M_PI, c).final_state();
    return std::hypot(s.x - 1, s.y);
  };
  for (double h : {0.2, 0.1, 0.05}) {
    CAPTURE(h);
    CHECK(err_at(h) / err_at(h / 2) >= 4.0);
  }
  // Adaptive: error is proportional to the tolerance.
  auto err_tol = [](double tol) {
    IntegratorConfig c;
    c.rtol = tol;
    c.atol = tol;
    const State2 s = integrate(rotation, {1, 0}, 0, 2 * M_PI, c).final_state();
    return std::hypot(s.x - 1, s.y);
  };
  for (double tol : {1e-5, 1e-7, 1e-9}) {
    CAPTURE(tol);
    CHECK(err_tol(tol) / err_tol(tol / 2) >= 1.8);
    CHECK(err_tol(tol) < 10 * tol);
  }
}

TEST_CASE("property: determinism") {
  oracle::Gen g(11);
  const SystemParams sp = SystemParams::corbeiller(CorbeillerParams(1.0, 0.25));
  for (int i = 0; i < 5; ++i) {
    const State2 s0{g.uniform(-2, 2), g.uniform(-2, 2)};
    IntegratorConfig c;
    c.h_max = default_h_max(0.05);
    auto f = [&](State2 s) { return field_normalized(sp, 0.05, s); };
    EventSpec ev{"y", [](State2 s) { return s.y; }, Direction::Any, false};
    const Trajectory a = integrate(f, s0, 0, 20, c, {ev}), b = integrate(f, s0, 0, 20, c, {ev});
    REQUIRE(a.times.size() == b.times.size());
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      REQUIRE(a.times[k] == b.times[k]);
      REQUIRE(a.states[k].x == b.states[k].x);
      REQUIRE(a.states[k].y == b.states[k].y);
    }
  }
}

TEST_CASE("property: time reversal on the rotation field") {
  oracle::Gen g(12);
  for (int i = 0; i < 20; ++i) {
    const State2 s0{g.uniform(-2, 2), g.uniform(-2, 2)};
    const double T = g.uniform(0.5, 20);
    IntegratorConfig c;
    c.rtol = 1e-10;
    c.atol = 1e-12;
    const Trajectory fw = integrate(rotation, s0, 0, T, c);
    const Trajectory bw = integrate(rotation, fw.final_state(), T, 0, c);
    const State2 s = bw.final_state();
    const double budget = 10.0 * (fw.times.size() + bw.times.size()) * (c.rtol * 2 + c.atol);
    CAPTURE(T);
    CHECK(std::hypot(s.x - s0.x, s.y - s0.y) < budget);
  }
}

TEST_CASE("property: event idempotence") {
  EventSpec rising{"y", [](State2 s) { return s.y; }, Direction::Rising, true};
  // From a state on y = 0 moving downward, a Rising event must not fire at once.
  const Trajectory tr = integrate(rotation, {1, 0}, 0, 1.0, tight(), {rising});
  CHECK(tr.events.empty());
  // Moving upward from exactly y = 0: g starts at 0, crossing test needs g_old < 0.
  const Trajectory up = integrate(rotation, {-1, 0}, 0, 1.0, tight(), {rising});
  CHECK(up.events.empty());
  // Re-integrating from a recorded event state with the same spec.
  EventSpec any{"y", [](State2 s) { return s.y; }, Direction::Any, true};
  const Trajectory first = integrate(rotation, {0.3, 0.5}, 0, 10, tight(), {any});
  REQUIRE(first.stopped_by_event);
  const Trajectory again = integrate(rotation, first.events[0].state, 0, 1e-3, tight(), {any});
  for (const auto& e : again.events) CHECK(e.t > 1e-12);
}

TEST_CASE("trajectory CSV") {
  EventSpec ev{"x0", [](State2 s) { return s.x; }, Direction::Any, false};
  const Trajectory tr = integrate([](State2) { return FieldValue{1, 0}; }, {-1, 0}, 0.0, 2.0, tight(), {ev});
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  const std::string s = os.str();
  CHECK(s.rfind("t,x,y\n", 0) == 0);
  CHECK(s.find("# event,x0,") != std::string::npos);
}

TEST_CASE("N-dimensional integration") {
  // Linear 3D decay; exact solution e^{-kt}.
  IntegratorConfig c = tight();
  auto tr = integrate_n<3>([](const VecN<3>& s) { return VecN<3>{-s[0], -2 * s[1], -3 * s[2]}; }, VecN<3>{1, 1, 1},
                           0.0, 2.0, c);
  CHECK(tr.final_state[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  CHECK(tr.final_state[1] == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  CHECK(tr.final_state[2] == doctest::Approx(std::exp(-6.0)).epsilon(1e-9));
}
