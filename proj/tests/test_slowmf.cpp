#include <cmath>
#include <sstream>

#include "doctest.h"
#include "exosc/cycles.hpp"
#include "exosc/singular.hpp"
#include "exosc/slowmf.hpp"
#include "oracles.hpp"

using namespace exosc;

namespace {

const HesterParams kHester(0.5, 0.4, 0.2, 0.3);
const CorbeillerParams kCorb(1.0, 0.25);

double hester_x_of_h(const HesterParams& p, double h) {
  return p.mu * (std::exp(h) - p.kappa * std::exp((1 + p.alpha) * h));
}

// Root h > y_j of x(h) = x by bisection, independent of the library bracket.
double hester_h_oracle(const HesterParams& p, double x) {
  const double yj = -std::log(p.kappa * (1 + p.alpha)) / p.alpha;
  long double lo = yj, hi = yj + 1.0;
  while (hester_x_of_h(p, hi) > x) hi += 1.0;
  for (int i = 0; i < 300; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (hester_x_of_h(p, mid) > x)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

Trajectory orbit(const SystemParams& p, double eps) {
  IntegratorConfig c;
  c.rtol = 1e-10;
  c.atol = 1e-12;
  c.h_max = default_h_max(eps);
  c.sample_dt = 0.01;
  return simulate_original_time(p, eps, {1, -1}, 50.0, c);
}

}  // namespace

TEST_CASE("Lambert W examples") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const double w1 = oracle::lambert_w_bisect(1.0);
  CHECK(std::abs(w1 - 0.5671432904097838) < 1e-15);
  CHECK(std::abs(lambert_w(1.0) - w1) < 1e-13);
  // Near the branch point W = -1 + p - p^2/3 with p = sqrt(2(e w + 1)).
  const double wb = -std::exp(-1.0) + 1e-12;
  const double pb = std::sqrt(2.0 * (std::exp(1.0) * wb + 1.0));
  CHECK(std::abs(lambert_w(wb) - (-1.0 + pb - pb * pb / 3.0)) < 1e-9);
  CHECK(std::abs(lambert_w(wb) + 1.0) < 2.5e-6);
  CHECK_THROWS_AS(lambert_w(-0.5), Error);
  oracle::Gen g(21);
  for (int i = 0; i < 200; ++i) {
    const double w = g.log_uniform(1e-6, 1e6);
    CHECK(lambert_w(w) == doctest::Approx(oracle::lambert_w_bisect(w)).epsilon(1e-13));
  }
}

TEST_CASE("property: W functional identity on log-spaced points") {
  const double lo = -std::exp(-1.0) + 1e-6;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    // Log spacing in distance from the branch point.
    const double d0 = 1e-6, d1 = 1e6 - lo;
    const double w = lo - 1e-6 + d0 * std::pow(d1 / d0, i / 9999.0);
    const double W = lambert_w(w);
    worst = std::max(worst, std::abs(W * std::exp(W) - w) / std::max(1.0, std::abs(w)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("property: W asymptotic bound") {
  for (double w : {1e3, 1e4, 1e5, 1e6, 1e8, 1e12}) {
    const double L = std::log(w);
    CAPTURE(w);
    CHECK(std::abs(lambert_w(w) / L - 1.0) <= 1.1 * std::log(L) / L);
  }
}

TEST_CASE("Z function") {
  CHECK(z_function(0.0) == 0.0);
  CHECK(z_function(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(z_function(0.1) == doctest::Approx(1.0 / oracle::lambert_w_bisect(10.0)).epsilon(1e-13));
  CHECK(oracle::lambert_w_bisect(10.0) == doctest::Approx(1.7455280027).epsilon(1e-10));
  oracle::Gen g(22);
  for (int i = 0; i < 500; ++i) {
    const double s = g.uniform(1e-9, 0.3);
    const double z = z_function(s);
    CHECK(z * std::exp(-1.0 / z) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("Hester slow manifold graph") {
  CHECK(slow_manifold_hester(kHester, 0.0) == doctest::Approx(2 * std::log(5.0)).epsilon(1e-12));
  const JumpPoint jp = hester_jump_point(kHester);
  CHECK(std::abs(slow_manifold_hester(kHester, jp.x_j - 1e-10) - jp.y_j) < 1e-4);
  const double h10 = slow_manifold_hester(kHester, -10.0);
  CHECK(std::abs(h10 - hester_h_oracle(kHester, -10.0)) < 1e-10);
  // Dominant balance kappa mu e^{(1+alpha)h} = 10 + mu e^h, both terms kept.
  const double hb = std::log((10.0 + 0.4 * std::exp(h10)) / 0.08) / 1.5;
  CHECK(std::abs(h10 / hb - 1.0) < 0.05);
  CHECK_THROWS_AS(slow_manifold_hester(kHester, jp.x_j + 0.1), Error);
}

TEST_CASE("property: Hester graph lies on the attracting branch") {
  oracle::Gen g(23);
  for (int i = 0; i < 300; ++i) {
    const HesterParams p(g.uniform(0.2, 2), g.uniform(0.1, 2), 0.0 + g.uniform(0.05, 0.9), g.uniform(0.1, 0.9));
    if (!p.cycle_condition()) continue;
    const JumpPoint jp = hester_jump_point(p);
    const double x = jp.x_j - g.log_uniform(1e-3, 20.0);
    const double h = slow_manifold_hester(p, x);
    CHECK(h > jp.y_j);
    CHECK(hester_x_of_h(p, h - 1e-6) >= x);
    CHECK(hester_x_of_h(p, h + 1e-6) <= x);
    CHECK(std::abs(h - hester_h_oracle(p, x)) < 1e-9 * (1 + h));
  }
}

TEST_CASE("Le Corbeiller slow manifold graph") {
  const double eps = 0.01;
  CHECK(slow_manifold_corbeiller(kCorb, eps, -eps * 0.25 * std::exp(1.0), ManifoldOrder::Leading) ==
        doctest::Approx(eps).epsilon(1e-14));
  const double w200 = oracle::lambert_w_bisect(200.0);
  CHECK(w200 * std::exp(w200) == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(slow_manifold_corbeiller(kCorb, eps, -0.5, ManifoldOrder::Leading) ==
        doctest::Approx(eps * w200).epsilon(1e-13));
  CHECK(slow_manifold_corbeiller(kCorb, eps, -0.5, ManifoldOrder::Full) ==
        doctest::Approx(eps * w200 * (1 + eps * 0.25 * 2 / 0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(slow_manifold_corbeiller(kCorb, eps, 0.1, ManifoldOrder::Leading), Error);
  CHECK_THROWS_AS(slow_manifold_corbeiller(kCorb, 0.0, -0.1, ManifoldOrder::Leading), Error);
}

TEST_CASE("manifold CSV") {
  std::ostringstream os;
  write_manifold_csv(os, {{-0.5, 0.03, ManifoldOrder::Leading}, {-0.4, 0.02, ManifoldOrder::Full}});
  CHECK(os.str().rfind("x,y_graph,order\n", 0) == 0);
  CHECK(os.str().find("leading") != std::string::npos);
  CHECK(os.str().find("full") != std::string::npos);
}

TEST_CASE("residual of a trajectory sampled from the graph itself") {
  Trajectory tr;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 0.8 * i / 200.0;
    tr.times.push_back(i);
    tr.states.push_back({x, slow_manifold_corbeiller(kCorb, 0.01, x, ManifoldOrder::Leading)});
  }
  CHECK(manifold_residual(SystemParams::corbeiller(kCorb), 0.01, tr, {-0.9, -0.3}) < 1e-15);
  CHECK_THROWS_AS(manifold_residual(SystemParams::corbeiller(kCorb), 0.01, tr, {0.1, 0.3}), Error);
}

TEST_CASE("simulated residuals against the slow manifolds") {
  const SystemParams hp = SystemParams::hester(kHester), cp = SystemParams::corbeiller(kCorb);
  CHECK(manifold_residual(hp, 0.01, orbit(hp, 0.01), {0.2, 1.0}) <= 0.05);
  const Trajectory c01 = orbit(cp, 0.01);
  CHECK(manifold_residual(cp, 0.01, c01, {-0.8, -0.3}, ManifoldOrder::Leading, true) <= 0.10);
  double prev = INFINITY;
  for (double eps : {0.05, 0.02, 0.01}) {
    const double r = manifold_residual(cp, eps, orbit(cp, eps), {-0.8, -0.3}, ManifoldOrder::Leading, true);
    CAPTURE(eps);
    CHECK(r < prev);
    prev = r;
  }
}
