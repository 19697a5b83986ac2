#include "exosc/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <random>
#include <thread>

namespace exosc {

namespace {

Direction section_direction(const SectionSpec& sec) {
  return sec.crossing == Crossing::Descending ? Direction::Falling : Direction::Rising;
}

double budget(double eps, const CycleOptions& opt) { return std::max(200.0, opt.budget_scale / eps); }

auto planar_field(const SystemParams& p, double eps) {
  return [p, eps](const VecN<2>& v) {
    const FieldValue f = field_normalized(p, eps, {v[0], v[1]});
    return VecN<2>{f.dx, f.dy};
  };
}

TrajectoryN<2> run_to_section(const SystemParams& p, double eps, const SectionSpec& sec, State2 s0,
                              const CycleOptions& opt) {
  IntegratorConfig cfg = cycle_integrator(eps, opt);
  cfg.record = false;
  const double d = sec.delta;
  std::vector<EventSpecN<2>> ev{{"section", [d](const VecN<2>& v) { return v[1] + d; }, section_direction(sec), true}};
  auto tr = integrate_n<2>(planar_field(p, eps), VecN<2>{s0.x, s0.y}, 0.0, budget(eps, opt), cfg, ev);
  if (!tr.stopped_by_event) throw Error(Errc::NoReturn, "no section crossing within the time budget");
  return tr;
}

State2 jump_start(const SystemParams& p) {
  if (p.system == System::Hester) return {hester_jump_point(p.as_hester()).x_j, 0.0};
  return {0.0, 0.0};
}

double divergence(const SystemParams& p, double eps, double x, double y) {
  const double hx = 1e-6 * (1.0 + std::abs(x)), hy = 1e-6 * eps;
  const double dxx = field_normalized(p, eps, {x + hx, y}).dx - field_normalized(p, eps, {x - hx, y}).dx;
  const double dyy = field_normalized(p, eps, {x, y + hy}).dy - field_normalized(p, eps, {x, y - hy}).dy;
  return dxx / (2.0 * hx) + dyy / (2.0 * hy);
}

// One return from (x, -delta), carrying the original time and the integral
// of the divergence (log of the planar Floquet multiplier) as extra states.
TrajectoryN<4> closed_orbit(const SystemParams& p, double eps, const SectionSpec& sec, double x,
                            const CycleOptions& opt) {
  IntegratorConfig cfg = cycle_integrator(eps, opt);
  cfg.record = true;
  auto f = [p, eps](const VecN<4>& v) {
    const FieldValue d = field_normalized(p, eps, {v[0], v[1]});
    return VecN<4>{d.dx, d.dy, time_factor(p, eps, v[1]), divergence(p, eps, v[0], v[1])};
  };
  const double d = sec.delta;
  std::vector<EventSpecN<4>> ev{{"section", [d](const VecN<4>& v) { return v[1] + d; }, section_direction(sec), true}};
  auto tr = integrate_n<4>(f, VecN<4>{x, -d, 0.0, 0.0}, 0.0, budget(eps, opt), cfg, ev);
  if (!tr.stopped_by_event) throw Error(Errc::NoReturn, "cycle orbit did not return to the section");
  return tr;
}

}  // namespace

IntegratorConfig cycle_integrator(double eps, const CycleOptions& opt) {
  IntegratorConfig cfg;
  cfg.rtol = opt.rtol;
  cfg.atol = opt.atol;
  cfg.h_max = default_h_max(eps);
  cfg.max_steps = opt.max_steps;
  return cfg;
}

double return_map(const SystemParams& p, double eps, const SectionSpec& sec, double x, const CycleOptions& opt) {
  if (!(eps > 0.0)) throw Error(Errc::DomainError, "eps must be positive");
  if (!(sec.delta > 0.0)) throw Error(Errc::DomainError, "section delta must be positive");
  return run_to_section(p, eps, sec, {x, -sec.delta}, opt).events.back().state[0];
}

double transient_seed(const SystemParams& p, double eps, const SectionSpec& sec, int returns,
                      const CycleOptions& opt) {
  State2 s = jump_start(p);
  for (int i = 0; i < returns; ++i) {
    const auto tr = run_to_section(p, eps, sec, s, opt);
    s = {tr.events.back().state[0], -sec.delta};
  }
  return s.x;
}

LimitCycle find_cycle(const SystemParams& p, double eps, const SectionSpec& sec, std::optional<double> seed,
                      const CycleOptions& opt) {
  p.validate();
  auto F = [&](double x) { return return_map(p, eps, sec, x, opt) - x; };

  double x_prev = seed ? *seed : transient_seed(p, eps, sec, 3, opt);
  double f_prev = F(x_prev);
  double x = x_prev + f_prev;
  double f = F(x);
  int it = 1;
  while (std::abs(f) > opt.secant_tol) {
    if (++it > opt.max_secant) throw Error(Errc::NoConvergence, "secant did not converge");
    const double denom = f - f_prev;
    double step = denom != 0.0 ? -f * (x - x_prev) / denom : f;
    if (!std::isfinite(step)) step = f;
    step = std::clamp(step, -0.5, 0.5);
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
    double x_new = x + step, f_new = F(x_new);
    for (int k = 0; k < 6 && std::abs(f_new) > std::abs(f); ++k) {
      step *= 0.5;
      x_new = x + step;
      f_new = F(x_new);
    }
    x_prev = x;
    f_prev = f;
    x = x_new;
    f = f_new;
  }
  if (std::abs(f) > 1e-9) throw Error(Errc::NoConvergence, "secant stagnated above the fixed-point tolerance");

  LimitCycle lc;
  lc.params = p;
  lc.eps = eps;
  lc.delta = sec.delta;
  lc.fixed_point_x = x;
  lc.fixed_point_residual = std::abs(f);
  lc.iterations = it;

  const double h = opt.floquet_step;
  lc.floquet = (return_map(p, eps, sec, x + h, opt) - return_map(p, eps, sec, x - h, opt)) / (2.0 * h);
  lc.floquet_floor_flag = std::abs(lc.floquet) < opt.floquet_floor;

  const auto orbit = closed_orbit(p, eps, sec, x, opt);
  const auto& hit = orbit.events.back();
  Polyline raw;
  raw.reserve(orbit.states.size() + 1);
  for (std::size_t i = 0; i < orbit.states.size(); ++i) {
    if (orbit.times[i] >= hit.t) break;
    raw.push_back({orbit.states[i][0], orbit.states[i][1]});
  }
  raw.push_back({hit.state[0], hit.state[1]});
  lc.points = resample_step(raw, opt.polyline_step);
  lc.period = hit.t;
  lc.period_original = hit.state[2];
  lc.log_floquet_divergence = hit.state[3];
  return lc;
}

const char* existence_name(Existence e) {
  switch (e) {
    case Existence::CycleFound: return "CycleFound";
    case Existence::ConvergesToEquilibrium: return "ConvergesToEquilibrium";
    case Existence::Indeterminate: return "Indeterminate";
  }
  return "?";
}

ExistenceResult classify_existence(const SystemParams& p, double eps, const ExistenceOptions& opt,
                                   const CycleOptions& copt) {
  ExistenceResult res;
  if (opt.n_seeds < 1) {
    res.note = "n_seeds must be at least 1";
    return res;
  }
  try {
    p.validate();
    if (p.system == System::Hester && std::abs(p.kappa * (1.0 + p.alpha) - 1.0) < 1e-12) {
      res.note = "kappa(1+alpha) = 1 is not covered by the existence theorem";
      return res;
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<State2> seeds;
    for (int i = 0; i < opt.n_seeds; ++i) {
      const double r = opt.ball_radius * std::sqrt(uni(rng));
      const double th = 2.0 * M_PI * uni(rng);
      seeds.push_back({r * std::cos(th), r * std::sin(th)});
    }

    const State2 eq = equilibrium(p, Epsilon(eps));
    IntegratorConfig cfg = cycle_integrator(eps, copt);
    cfg.record = false;
    FieldFn f = [p, eps](State2 s) { return field_normalized(p, eps, s); };
    int far = 0;
    for (const auto& s : seeds) {
      const State2 e = flow_map(f, s, opt.t_equilibrium, cfg);
      if (std::hypot(e.x - eq.x, e.y - eq.y) >= opt.equilibrium_tol) ++far;
    }
    if (far == 0) {
      res.kind = Existence::ConvergesToEquilibrium;
      return res;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d of %d seeds not within %g of the equilibrium by t1=%g; ", far, opt.n_seeds,
                  opt.equilibrium_tol, opt.t_equilibrium);
    res.note = buf;

    LimitCycle lc = find_cycle(p, eps, opt.section, std::nullopt, copt);
    for (const auto& s : seeds) {
      State2 cur = s;
      bool hit = false;
      for (int k = 0; k < opt.max_returns && !hit; ++k) {
        const auto tr = run_to_section(p, eps, opt.section, cur, copt);
        cur = {tr.events.back().state[0], -opt.section.delta};
        hit = std::abs(cur.x - lc.fixed_point_x) < opt.cycle_tol;
      }
      if (!hit) {
        res.note += "a seed did not approach the cycle";
        return res;
      }
    }
    res.kind = Existence::CycleFound;
    res.note.clear();
    res.cycle = std::move(lc);
  } catch (const Error& e) {
    res.kind = Existence::Indeterminate;
    res.note += e.what();
  }
  return res;
}

ConvergenceReport convergence_study(const SystemParams& p, const std::vector<double>& eps_list,
                                    const SectionSpec& sec, double resample_step, unsigned threads,
                                    const CycleOptions& opt) {
  if (eps_list.empty()) throw Error(Errc::EmptyInput, "eps list is empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(Errc::DomainError, "eps list must be strictly decreasing");

  const SingularCycle sc = singular_cycle(p);
  std::vector<Polyline> gamma0;
  for (const auto& s : sc.segments) gamma0.push_back(s.points);

  ConvergenceReport rep{p, std::vector<ConvergenceRow>(eps_list.size())};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps_list.size(); i = next++) {
      ConvergenceRow& row = rep.rows[i];
      row.eps = eps_list[i];
      try {
        const LimitCycle lc = find_cycle(p, row.eps, sec, std::nullopt, opt);
        row.hausdorff = hausdorff_distance({lc.points}, gamma0, resample_step);
        row.period = lc.period;
        row.period_original = lc.period_original;
        row.log_floquet = std::log(std::abs(lc.floquet));
        row.floor_flag = lc.floquet_floor_flag;
        row.log_floquet_divergence = lc.log_floquet_divergence;
        row.fixed_point_x = lc.fixed_point_x;
        row.ok = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(eps_list.size()));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r) {
  os << std::setprecision(17) << "eps,hausdorff,period,log_floquet,floor_flag,period_t,fixed_point_x,log_floquet_div,error\n";
  for (const auto& row : r.rows) {
    os << row.eps << ',';
    if (row.ok)
      os << row.hausdorff << ',' << row.period << ',' << row.log_floquet << ',' << (row.floor_flag ? 1 : 0) << ','
         << row.period_original << ',' << row.fixed_point_x << ',' << row.log_floquet_divergence << ",\n";
    else
      os << ",,,,,,,\"" << row.error << "\"\n";
  }
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) throw Error(Errc::EmptyInput, "slope needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

Trajectory simulate_original_time(const SystemParams& p, double eps, State2 s0, double t_end,
                                  const IntegratorConfig& cfg) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(Errc::DomainError, "t_end must be positive");
  auto f = [&](const VecN<3>& s) {
    const FieldValue v = field_normalized(p, eps, {s[0], s[1]});
    return VecN<3>{v.dx, v.dy, time_factor(p, eps, s[1])};
  };
  std::vector<EventSpecN<3>> ev = {
      {"y=0", [](const VecN<3>& s) { return s[1]; }, Direction::Any, false},
      {"t_end", [t_end](const VecN<3>& s) { return s[2] - t_end; }, Direction::Rising, true}};
  // dt/dt1 <= 1, so t1 >= t; the budget only guards against stalls in the upper region.
  const auto tr = integrate_n<3>(f, VecN<3>{s0.x, s0.y, 0.0}, 0.0, std::max(1e6, 1e3 * t_end), cfg, ev);
  if (!tr.stopped_by_event) throw Error(Errc::IntegrationFailure, "original time did not reach t_end");
  Trajectory out;
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    if (tr.states[i][2] >= t_end) break;
    out.times.push_back(tr.states[i][2]);
    out.states.push_back({tr.states[i][0], tr.states[i][1]});
  }
  for (const auto& e : tr.events) {
    if (e.id != "y=0") continue;
    auto it = std::upper_bound(out.times.begin(), out.times.end(), e.state[2]);
    const std::size_t idx = it == out.times.begin() ? 0 : static_cast<std::size_t>(it - out.times.begin()) - 1;
    out.events.push_back({idx, e.id, e.state[2], {e.state[0], e.state[1]}});
  }
  const auto& last = tr.events.back().state;
  out.times.push_back(t_end);
  out.states.push_back({last[0], last[1]});
  out.stopped_by_event = true;
  return out;
}

}  // namespace exosc
