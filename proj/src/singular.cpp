#include "exosc/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exosc/ode.hpp"

namespace exosc {

namespace {

constexpr std::size_t kGammaOnePoints = 2000;

FieldValue hester_lower(const HesterParams& p, State2 s) { return {s.y, -s.x - 2.0 * p.gamma * s.y}; }
FieldValue corbeiller_lower(const CorbeillerParams& p, State2 s) { return {s.y + p.a, -s.x + 2.0 * p.b * s.y}; }

// Lower-field arc from s0 to its next upward crossing of y = 0.
Trajectory lower_arc(const FieldFn& f, State2 s0, double rtol, double sample_dt) {
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = rtol * 1e-3;
  cfg.h_max = 0.05;
  cfg.sample_dt = sample_dt;
  EventSpec ev{"sigma", [](State2 s) { return s.y; }, Direction::Rising, true};
  Trajectory tr = integrate(f, s0, 0.0, 1e3, cfg, {ev});
  if (!tr.stopped_by_event || tr.events.empty())
    throw Error(Errc::IntegrationFailure, "lower field orbit did not return to y = 0");
  return tr;
}

// Advance off the tangency at the origin before watching for y = 0.
Trajectory corbeiller_arc(const CorbeillerParams& p, double rtol, double sample_dt) {
  FieldFn f = [p](State2 s) { return corbeiller_lower(p, s); };
  IntegratorConfig pre;
  pre.rtol = rtol;
  pre.atol = rtol * 1e-3;
  const State2 s1 = flow_map(f, {0.0, 0.0}, 1e-6, pre);
  Trajectory tr = lower_arc(f, s1, rtol, sample_dt);
  tr.times.insert(tr.times.begin(), 0.0);
  tr.states.insert(tr.states.begin(), State2{0.0, 0.0});
  return tr;
}

Polyline arc_points(const Trajectory& tr) {
  Polyline pts;
  const auto& hit = tr.events.back();
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    if (tr.times[i] >= hit.t) break;
    pts.push_back(tr.states[i]);
  }
  pts.push_back({hit.state.x, 0.0});
  return pts;
}

}  // namespace

JumpPoint hester_jump_point(const HesterParams& p) {
  if (!p.cycle_condition()) throw Error(Errc::ConditionViolated, "kappa(1+alpha) must lie in (0,1)");
  const double a = p.alpha;
  const double yj = -std::log(p.kappa * (1.0 + a)) / a;
  const double xj = p.mu * a / (std::pow(1.0 + a, (1.0 + a) / a) * std::pow(p.kappa, 1.0 / a));
  return {xj, yj};
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Attracting: return "attracting";
    case Branch::Fold: return "fold";
    case Branch::Repelling: return "repelling";
  }
  return "?";
}

CriticalManifoldSample critical_manifold_hester(const HesterParams& p, double y2) {
  // The fold ordinate only needs kappa(1+alpha) > 0; its sign decides where the
  // equilibrium sits.
  const double yj = -std::log(p.kappa * (1.0 + p.alpha)) / p.alpha;
  const double x = p.mu * (std::exp(y2) - p.kappa * std::exp((1.0 + p.alpha) * y2));
  Branch br = Branch::Fold;
  if (std::abs(y2 - yj) > 1e-12) br = y2 > yj ? Branch::Attracting : Branch::Repelling;
  return {y2, x, br};
}

double drop_point_hester(const HesterParams& p) {
  const JumpPoint j = hester_jump_point(p);
  return -j.x_j * std::exp(-p.gamma * M_PI / std::sqrt(1.0 - p.gamma * p.gamma));
}

double drop_point_hester_integrated(const HesterParams& p, double rtol) {
  const JumpPoint j = hester_jump_point(p);
  FieldFn f = [p](State2 s) { return hester_lower(p, s); };
  return lower_arc(f, {j.x_j, 0.0}, rtol, 0.0).events.back().state.x;
}

double drop_point_corbeiller(const CorbeillerParams& p, double rtol) {
  const double xd = corbeiller_arc(p, rtol, 0.0).events.back().state.x;
  if (!(xd < 0.0)) throw Error(Errc::IntegrationFailure, "drop point is not on the negative x-axis");
  return xd;
}

SingularCycle singular_cycle(const SystemParams& p) {
  SingularCycle sc{p, {}};
  Polyline g1;
  State2 jump;
  if (p.system == System::Hester) {
    const HesterParams hp = p.as_hester();
    const JumpPoint j = hester_jump_point(hp);
    jump = {j.x_j, 0.0};
    FieldFn f = [hp](State2 s) { return hester_lower(hp, s); };
    g1 = arc_points(lower_arc(f, jump, 1e-11, 1e-3));
    g1.back().x = drop_point_hester(hp);
  } else {
    jump = {0.0, 0.0};
    g1 = arc_points(corbeiller_arc(p.as_corbeiller(), 1e-11, 1e-3));
  }
  g1 = resample_count(g1, kGammaOnePoints);
  g1.front() = jump;
  const State2 drop = g1.back();
  sc.segments.push_back({"Gamma1", std::move(g1)});
  sc.segments.push_back({"Gamma2", {drop, jump}});
  return sc;
}

double polyline_length(const Polyline& pl) {
  double len = 0.0;
  for (std::size_t i = 1; i < pl.size(); ++i) len += std::hypot(pl[i].x - pl[i - 1].x, pl[i].y - pl[i - 1].y);
  return len;
}

Polyline resample_count(const Polyline& pl, std::size_t n) {
  if (pl.empty()) throw Error(Errc::EmptyInput, "empty polyline");
  if (pl.size() == 1 || n < 2) return {pl.front()};
  std::vector<double> cum(pl.size(), 0.0);
  for (std::size_t i = 1; i < pl.size(); ++i)
    cum[i] = cum[i - 1] + std::hypot(pl[i].x - pl[i - 1].x, pl[i].y - pl[i - 1].y);
  const double total = cum.back();
  if (total == 0.0) return {pl.front()};
  Polyline out;
  out.reserve(n);
  std::size_t k = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n - 1);
    while (k + 1 < pl.size() && cum[k] < s) ++k;
    const double seg = cum[k] - cum[k - 1];
    const double t = seg > 0.0 ? std::clamp((s - cum[k - 1]) / seg, 0.0, 1.0) : 0.0;
    out.push_back({pl[k - 1].x + t * (pl[k].x - pl[k - 1].x), pl[k - 1].y + t * (pl[k].y - pl[k - 1].y)});
  }
  out.back() = pl.back();
  return out;
}

Polyline resample_step(const Polyline& pl, double step) {
  if (!(step > 0.0)) throw Error(Errc::DomainError, "resample step must be positive");
  const double len = polyline_length(pl);
  const auto n = static_cast<std::size_t>(std::ceil(len / step)) + 1;
  return resample_count(pl, std::max<std::size_t>(n, 2));
}

double hausdorff_distance(const std::vector<Polyline>& A, const std::vector<Polyline>& B, double step) {
  auto gather = [step](const std::vector<Polyline>& S) {
    Polyline pts;
    for (const auto& pl : S) {
      if (pl.empty()) continue;
      const Polyline r = resample_step(pl, step);
      pts.insert(pts.end(), r.begin(), r.end());
    }
    return pts;
  };
  const Polyline a = gather(A), b = gather(B);
  if (a.empty() || b.empty()) throw Error(Errc::EmptyInput, "Hausdorff distance needs two nonempty sets");
  auto directed = [](const Polyline& u, const Polyline& v) {
    double worst = 0.0;
    for (const auto& p : u) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : v) {
        const double dx = p.x - q.x, dy = p.y - q.y;
        best = std::min(best, dx * dx + dy * dy);
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace exosc
