#include <cmath>

#include "doctest.h"
#include "exosc/error.hpp"
#include "exosc/models.hpp"
#include "oracles.hpp"

using namespace exosc;

namespace {

const HesterParams kHester(0.5, 0.4, 0.2, 0.3);
const CorbeillerParams kCorb(1.0, 0.25);

// Literal right-hand sides in long double, used where no exponent overflows.
FieldValue hester_literal(const HesterParams& p, double eps, State2 s) {
  const long double y = s.y, e = eps;
  const long double dx = y, dy = -s.x - 2.0L * p.gamma * y + p.mu * (std::exp(y / e) - p.kappa * std::exp((1 + p.alpha) * y / e));
  return {static_cast<double>(dx), static_cast<double>(dy)};
}

FieldValue corb_literal(const CorbeillerParams& p, double eps, State2 s) {
  const long double y = s.y, e = eps;
  return {static_cast<double>(y + p.a), static_cast<double>(-s.x + p.b * y * (2.0L - std::exp(y / e)))};
}

}  // namespace

TEST_CASE("softplus values and saturation") {
  CHECK(softplus(0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(std::abs(softplus(1000.0) - 1000.0) <= 1e-300);
  CHECK(softplus(-1000.0) <= std::exp(-1000.0) + 1e-300);
  oracle::Gen g(1);
  double prev = softplus(-50.0);
  for (int i = 0; i < 200; ++i) {
    const double u = -50.0 + 0.5 * (i + 1);
    const double v = softplus(u);
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  for (int i = 0; i < 200; ++i) {
    const double u = g.uniform(-30, 30);
    CHECK(softplus(u) == doctest::Approx(std::log1p(std::exp(u))).epsilon(1e-14));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(HesterParams(0.0, 0.4, 0.2, 0.3), Error);
  CHECK_THROWS_AS(HesterParams(0.5, -1, 0.2, 0.3), Error);
  CHECK_THROWS_AS(HesterParams(0.5, 0.4, 0.0, 0.3), Error);
  CHECK_THROWS_AS(HesterParams(0.5, 0.4, 0.2, 1.0), Error);
  CHECK_THROWS_AS(HesterParams(0.5, 0.4, 0.2, 1.5), Error);
  CHECK_THROWS_AS(CorbeillerParams(0.0, 0.25), Error);
  CHECK_THROWS_AS(CorbeillerParams(1.0, 1.0), Error);
  CHECK_THROWS_AS(CorbeillerParams(1.0, 0.0), Error);
  try {
    HesterParams(0.5, 0.4, 0.2, 1.5);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidParams);
  }
  CHECK(kHester.cycle_condition());
  CHECK_FALSE(HesterParams(0.5, 0.4, 0.8, 0.3).cycle_condition());
  CHECK_THROWS_AS(Epsilon(0.0), Error);
  CHECK_THROWS_AS(Epsilon(-0.1), Error);
  CHECK_THROWS_AS(Epsilon::pws().value(), Error);
}

TEST_CASE("normalized Hester field examples") {
  FieldValue f = hester_field_normalized(kHester, Epsilon(0.1), {0, 0});
  CHECK(f.dx == 0.0);
  CHECK(f.dy == doctest::Approx(0.16).epsilon(1e-15));
  f = hester_field_normalized(kHester, Epsilon(0.01), {0.5, -1});
  CHECK(std::abs(f.dx + 1.0) <= 1e-40);
  CHECK(std::abs(f.dy - 0.1) <= 1e-15);  // the e^{-100} deviation is below double resolution of 0.1
  f = hester_field_normalized(kHester, Epsilon(0.01), {0.5, 1});
  CHECK(std::abs(f.dx) <= 1e-20);
  CHECK(std::abs(f.dy + 0.08) <= 1e-15);
}

TEST_CASE("normalized Le Corbeiller field examples") {
  FieldValue f = corbeiller_field_normalized(kCorb, Epsilon(0.1), {0, 0});
  CHECK(f.dx == doctest::Approx(0.5));
  CHECK(f.dy == 0.0);
  f = corbeiller_field_normalized(kCorb, Epsilon(0.01), {0.3, -0.5});
  CHECK(std::abs(f.dx - 0.5) <= 1e-20);
  CHECK(std::abs(f.dy + 0.55) <= 1e-15);
  f = corbeiller_field_normalized(kCorb, Epsilon(0.01), {0.3, 0.5});
  CHECK(std::abs(f.dx) <= 1e-20);
  CHECK(std::abs(f.dy + 0.125) <= 1e-20);
}

TEST_CASE("raw fields and overflow guard") {
  FieldValue f = hester_field_raw(kHester, Epsilon(0.1), {0, 0});
  CHECK(f.dx == 0.0);
  CHECK(f.dy == doctest::Approx(0.32));
  f = corbeiller_field_raw(kCorb, Epsilon(0.1), {0, 0});
  CHECK(f.dx == 1.0);
  CHECK(f.dy == 0.0);
  try {
    hester_field_raw(kHester, Epsilon(0.001), {0, 1});
    FAIL("expected OverflowGuard");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OverflowGuard);
  }
  CHECK_THROWS_AS(corbeiller_field_raw(kCorb, Epsilon(0.001), {0, 1}), Error);
  oracle::Gen g(2);
  for (int i = 0; i < 200; ++i) {
    const State2 s{g.uniform(-3, 3), g.uniform(-2, 2)};
    const double eps = g.uniform(0.05, 1.0);
    const FieldValue a = hester_field_raw(kHester, Epsilon(eps), s), b = hester_literal(kHester, eps, s);
    CHECK(a.dx == doctest::Approx(b.dx).epsilon(1e-13));
    CHECK(a.dy == doctest::Approx(b.dy).epsilon(1e-12).scale(1.0));
    const FieldValue c = corbeiller_field_raw(kCorb, Epsilon(eps), s), d = corb_literal(kCorb, eps, s);
    CHECK(c.dx == doctest::Approx(d.dx).epsilon(1e-13));
    CHECK(c.dy == doctest::Approx(d.dy).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("PWS limit fields") {
  FieldValue f = hester_pws_field(kHester, {1, -1});
  CHECK(f.dx == -1.0);
  CHECK(f.dy == doctest::Approx(-0.4));
  f = hester_pws_field(kHester, {5, 3});
  CHECK(f.dx == 0.0);
  CHECK(f.dy == doctest::Approx(-0.08));
  f = corbeiller_pws_field(kCorb, {2, 3});
  CHECK(f.dx == 0.0);
  CHECK(f.dy == doctest::Approx(-0.75));
  try {
    hester_pws_field(kHester, {1, 0});
    FAIL("expected OnSwitchingManifold");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OnSwitchingManifold);
  }
  CHECK_THROWS_AS(corbeiller_pws_field(kCorb, {1, 0}), Error);
}

TEST_CASE("equilibria and their raw residual") {
  const State2 h = hester_equilibrium(kHester);
  CHECK(h.x == doctest::Approx(0.32));
  CHECK(h.y == 0.0);
  const FieldValue rh = hester_field_raw(kHester, Epsilon(0.1), h);
  CHECK(std::hypot(rh.dx, rh.dy) < 1e-12);

  const State2 c = corbeiller_equilibrium(kCorb, Epsilon(0.1));
  CHECK(c.x == doctest::Approx(-0.25 * (2.0 - std::exp(-10.0))).epsilon(1e-15));
  CHECK(c.x == doctest::Approx(-0.4999886).epsilon(1e-7));
  CHECK(c.y == -1.0);
  const FieldValue rc = corbeiller_field_raw(kCorb, Epsilon(0.1), c);
  CHECK(std::hypot(rc.dx, rc.dy) < 1e-12);
  const State2 c0 = corbeiller_equilibrium(kCorb, Epsilon::pws());
  CHECK(c0.x == -0.5);
  CHECK(c0.y == -1.0);

  oracle::Gen g(3);
  for (int i = 0; i < 100; ++i) {
    const HesterParams hp(g.uniform(0.1, 2), g.uniform(0.1, 2), g.uniform(0.05, 2), g.uniform(0.05, 0.95));
    const FieldValue r = hester_field_raw(hp, Epsilon(g.uniform(0.01, 1)), hester_equilibrium(hp));
    CHECK(std::hypot(r.dx, r.dy) < 1e-12);
    const CorbeillerParams cp(g.uniform(0.1, 3), g.uniform(0.05, 0.95));
    const double eps = g.uniform(0.05, 1);
    const FieldValue q = corbeiller_field_raw(cp, Epsilon(eps), corbeiller_equilibrium(cp, Epsilon(eps)));
    CHECK(std::hypot(q.dx, q.dy) < 1e-12);
  }
}

TEST_CASE("property: normalized fields are total") {
  oracle::Gen g(4);
  for (int i = 0; i < 2000; ++i) {
    const double eps = g.log_uniform(1e-6, 1.0);
    const double y = (g.uniform(0, 1) < 0.5 ? -1 : 1) * g.log_uniform(1e-8, 1e6) * eps;
    const State2 s{g.uniform(-1e3, 1e3), y};
    const FieldValue a = hester_field_normalized(kHester, Epsilon(eps), s);
    const FieldValue b = corbeiller_field_normalized(kCorb, Epsilon(eps), s);
    REQUIRE(std::isfinite(a.dx));
    REQUIRE(std::isfinite(a.dy));
    REQUIRE(std::isfinite(b.dx));
    REQUIRE(std::isfinite(b.dy));
  }
}

TEST_CASE("property: raw and normalized fields are positive multiples") {
  oracle::Gen g(5);
  const double eps = 0.1;
  for (int i = 0; i < 500; ++i) {
    const State2 s{g.uniform(-3, 3), g.uniform(-5.0, 5.0) * eps / 1.5};
    const FieldValue hr = hester_field_raw(kHester, Epsilon(eps), s), hn = hester_field_normalized(kHester, Epsilon(eps), s);
    const double fh = 1.0 / (1.0 + std::exp(1.5 * s.y / eps));
    CHECK(hester_time_factor(kHester, eps, s.y) == doctest::Approx(fh).epsilon(1e-12));
    CHECK(hn.dx == doctest::Approx(fh * hr.dx).epsilon(1e-12).scale(1e-300));
    CHECK(hn.dy == doctest::Approx(fh * hr.dy).epsilon(1e-12).scale(1e-12));
    const State2 t{g.uniform(-3, 3), g.uniform(-50.0, 50.0) * eps};
    const FieldValue cr = corbeiller_field_raw(kCorb, Epsilon(eps), t), cn = corbeiller_field_normalized(kCorb, Epsilon(eps), t);
    const double fc = 1.0 / (1.0 + std::exp(t.y / eps));
    CHECK(corbeiller_time_factor(eps, t.y) == doctest::Approx(fc).epsilon(1e-12));
    CHECK(cn.dx == doctest::Approx(fc * cr.dx).epsilon(1e-12).scale(1e-300));
    CHECK(cn.dy == doctest::Approx(fc * cr.dy).epsilon(1e-12).scale(1e-12 * fc * (std::abs(t.x) + 1)));
  }
}

TEST_CASE("property: exponential convergence to the PWS field") {
  // log ||f_eps - f_pws|| is linear in 1/eps with negative slope.
  for (double y : {-0.5, -0.3, 0.3, 0.5}) {
    for (int sys = 0; sys < 2; ++sys) {
      std::vector<double> xs, ys;
      for (double eps : {0.1, 0.05, 0.02}) {
        const State2 s{0.7, y};
        const FieldValue f = sys == 0 ? hester_field_normalized(kHester, Epsilon(eps), s)
                                      : corbeiller_field_normalized(kCorb, Epsilon(eps), s);
        const FieldValue p = sys == 0 ? hester_pws_field(kHester, s) : corbeiller_pws_field(kCorb, s);
        xs.push_back(1.0 / eps);
        ys.push_back(std::log(std::hypot(f.dx - p.dx, f.dy - p.dy)));
      }
      const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
      double sxy = 0, sxx = 0, syy = 0;
      for (int k = 0; k < 3; ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
        syy += (ys[k] - my) * (ys[k] - my);
      }
      const double slope = sxy / sxx, r2 = sxy * sxy / (sxx * syy);
      CAPTURE(y);
      CAPTURE(sys);
      CHECK(slope < 0.0);
      CHECK(r2 > 0.99);
    }
  }
}

TEST_CASE("system dispatch") {
  CHECK(parse_system("hester") == System::Hester);
  CHECK(parse_system("corbeiller") == System::Corbeiller);
  CHECK_THROWS_AS(parse_system("vdp"), Error);
  const SystemParams sp = SystemParams::corbeiller(kCorb);
  const FieldValue a = field_normalized(sp, 0.1, {0.2, -0.3}), b = corbeiller_field_normalized(kCorb, Epsilon(0.1), {0.2, -0.3});
  CHECK(a.dx == b.dx);
  CHECK(a.dy == b.dy);
  CHECK(time_factor(sp, 0.1, 0.3) == corbeiller_time_factor(0.1, 0.3));
}
