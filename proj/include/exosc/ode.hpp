#pragma once

// Dormand-Prince 5(4) with the 4th-order continuous extension and
// bisection-refined events. Templated on dimension so the chart systems
// (3 and 4 variables) share the planar integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "exosc/error.hpp"
#include "exosc/models.hpp"

namespace exosc {

template <std::size_t N>
using VecN = std::array<double, N>;

enum class Direction { Rising, Falling, Any };

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;  // <= 0 picks a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 5'000'000;
  double event_time_tol = 1e-12;
  // When > 0, dense-output samples are inserted so stored times are at most
  // this far apart.
  double sample_dt = 0.0;
  bool record = true;

  void validate() const;
};

// Default h_max for the rescaled fields: small enough not to skip the O(eps)
// switching layer.
inline double default_h_max(double eps) { return std::min(0.1, 10.0 * eps); }

template <std::size_t N>
struct EventSpecN {
  std::string id;
  std::function<double(const VecN<N>&)> g;
  Direction direction = Direction::Any;
  bool terminal = false;
};

template <std::size_t N>
struct EventHitN {
  std::size_t index;  // position in Trajectory::times at or before the hit
  std::string id;
  double t;
  VecN<N> state;
};

template <std::size_t N>
struct TrajectoryN {
  std::vector<double> times;
  std::vector<VecN<N>> states;
  std::vector<EventHitN<N>> events;
  VecN<N> final_state{};
  double final_time = 0.0;
  bool stopped_by_event = false;
  long steps = 0;
};

namespace detail {

struct Dopri {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <std::size_t N>
struct Dense {
  double t0 = 0.0, h = 0.0;
  VecN<N> r1{}, r2{}, r3{}, r4{}, r5{};

  VecN<N> operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    VecN<N> out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    return out;
  }
};

inline bool crossed(double g_old, double g_new, Direction d) {
  const bool rising = g_old < 0.0 && g_new >= 0.0;
  const bool falling = g_old > 0.0 && g_new <= 0.0;
  switch (d) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Any: return rising || falling;
  }
  return false;
}

template <std::size_t N>
double err_norm(const VecN<N>& err, const VecN<N>& y0, const VecN<N>& y1, double rtol, double atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sk;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

template <std::size_t N>
bool all_finite(const VecN<N>& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace detail

// Integrates s' = f(s) from t0 to t1 (t1 < t0 runs backward).
template <std::size_t N, class F>
TrajectoryN<N> integrate_n(F&& f, VecN<N> s0, double t0, double t1, const IntegratorConfig& cfg,
                           const std::vector<EventSpecN<N>>& events = {}) {
  using detail::Dopri;
  cfg.validate();
  if (!(t1 != t0) || !std::isfinite(t0) || !std::isfinite(t1))
    throw Error(Errc::DomainError, "degenerate time span");
  if (!detail::all_finite(s0)) throw Error(Errc::DomainError, "non-finite initial state");

  const double span = std::abs(t1 - t0);
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double h_min = 1e-14 * span;
  const double h_max = std::min(cfg.h_max, span);

  TrajectoryN<N> tr;
  if (cfg.record) {
    tr.times.push_back(t0);
    tr.states.push_back(s0);
  }

  VecN<N> y = s0, k1 = f(y), k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
  double t = t0;

  double h = cfg.h_init;
  if (!(h > 0.0)) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = cfg.atol + cfg.rtol * std::abs(y[i]);
      d0 += (y[i] / sk) * (y[i] / sk);
      d1 += (k1[i] / sk) * (k1[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, h_max, 1e-2 * span});
  }
  h = std::min(h, h_max);

  std::vector<double> g_old(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_old[e] = events[e].g(y);

  bool last_rejected = false;
  while (dir * (t1 - t) > 0.0) {
    if (tr.steps >= cfg.max_steps)
      throw Error(Errc::MaxStepsExceeded, "step budget exhausted at t=" + std::to_string(t));
    if (h < h_min) throw Error(Errc::StepUnderflow, "step size below 1e-14*|span| at t=" + std::to_string(t));
    bool final_step = false;
    if (h >= dir * (t1 - t)) {
      h = dir * (t1 - t);
      final_step = true;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * Dopri::a21 * k1[i];
    k2 = f(ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + hs * (Dopri::a31 * k1[i] + Dopri::a32 * k2[i]);
    k3 = f(ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (Dopri::a41 * k1[i] + Dopri::a42 * k2[i] + Dopri::a43 * k3[i]);
    k4 = f(ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (Dopri::a51 * k1[i] + Dopri::a52 * k2[i] + Dopri::a53 * k3[i] +
                             Dopri::a54 * k4[i]);
    k5 = f(ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + hs * (Dopri::a61 * k1[i] + Dopri::a62 * k2[i] + Dopri::a63 * k3[i] +
                             Dopri::a64 * k4[i] + Dopri::a65 * k5[i]);
    k6 = f(ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + hs * (Dopri::a71 * k1[i] + Dopri::a73 * k3[i] + Dopri::a74 * k4[i] +
                             Dopri::a75 * k5[i] + Dopri::a76 * k6[i]);
    k7 = f(ynew);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = hs * (Dopri::e1 * k1[i] + Dopri::e3 * k3[i] + Dopri::e4 * k4[i] + Dopri::e5 * k5[i] +
                     Dopri::e6 * k6[i] + Dopri::e7 * k7[i]);

    double en = detail::err_norm(err, y, ynew, cfg.rtol, cfg.atol);
    if (!std::isfinite(en) || !detail::all_finite(ynew)) en = 1e10;

    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      continue;
    }
    ++tr.steps;

    detail::Dense<N> dense;
    dense.t0 = t;
    dense.h = hs;
    for (std::size_t i = 0; i < N; ++i) {
      dense.r1[i] = y[i];
      dense.r2[i] = ynew[i] - y[i];
      dense.r3[i] = hs * k1[i] - dense.r2[i];
      dense.r4[i] = dense.r2[i] - hs * k7[i] - dense.r3[i];
      dense.r5[i] = hs * (Dopri::d1 * k1[i] + Dopri::d3 * k3[i] + Dopri::d4 * k4[i] +
                          Dopri::d5 * k5[i] + Dopri::d6 * k6[i] + Dopri::d7 * k7[i]);
    }
    const double t_new = final_step ? t1 : t + hs;

    // Events inside (t, t_new].
    double t_stop = t_new;
    bool stop = false;
    std::vector<EventHitN<N>> hits;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g_new = events[e].g(ynew);
      if (detail::crossed(g_old[e], g_new, events[e].direction)) {
        double lo = t, hi = t_new;
        const bool lo_neg = g_old[e] < 0.0;
        while (std::abs(hi - lo) > cfg.event_time_tol) {
          const double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          const double gm = events[e].g(dense(mid));
          const bool same_side = lo_neg ? gm < 0.0 : gm > 0.0;
          if (same_side)
            lo = mid;
          else
            hi = mid;
        }
        const std::size_t idx = cfg.record ? tr.times.size() - 1 : 0;
        hits.push_back({idx, events[e].id, hi, dense(hi)});
        if (events[e].terminal && dir * (hi - t_stop) <= 0.0) {
          t_stop = hi;
          stop = true;
        }
      }
      g_old[e] = g_new;
    }
    std::sort(hits.begin(), hits.end(),
              [dir](const EventHitN<N>& a, const EventHitN<N>& b) { return dir * (a.t - b.t) < 0.0; });
    for (auto& hit : hits)
      if (dir * (hit.t - t_stop) <= 0.0) tr.events.push_back(hit);

    if (cfg.record && cfg.sample_dt > 0.0) {
      const double end = stop ? t_stop : t_new;
      const int n = static_cast<int>(std::floor(std::abs(end - t) / cfg.sample_dt));
      for (int j = 1; j <= n; ++j) {
        const double ts = t + dir * j * cfg.sample_dt;
        if (dir * (end - ts) <= 0.0) break;
        tr.times.push_back(ts);
        tr.states.push_back(dense(ts));
      }
    }

    if (stop) {
      y = dense(t_stop);
      t = t_stop;
      if (cfg.record && t != tr.times.back()) {
        tr.times.push_back(t);
        tr.states.push_back(y);
      }
      tr.stopped_by_event = true;
      break;
    }

    t = t_new;
    y = ynew;
    k1 = k7;
    if (cfg.record) {
      tr.times.push_back(t);
      tr.states.push_back(y);
    }
    if (final_step) break;

    double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
    h = std::min(h * fac, h_max);
    last_rejected = false;
  }
  tr.final_state = y;
  tr.final_time = t;
  return tr;
}

// Planar interface over State2.
using FieldFn = std::function<FieldValue(State2)>;

struct EventSpec {
  std::string event_id;
  std::function<double(State2)> g;
  Direction direction = Direction::Any;
  bool terminal = false;
};

struct EventRecord {
  std::size_t index;
  std::string event_id;
  double t;
  State2 state;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State2> states;
  std::vector<EventRecord> events;
  bool stopped_by_event = false;

  State2 final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

Trajectory integrate(const FieldFn& field, State2 s0, double t0, double t1, const IntegratorConfig& cfg,
                     const std::vector<EventSpec>& events = {});

State2 flow_map(const FieldFn& field, State2 s0, double T, const IntegratorConfig& cfg);

// CSV: header t,x,y then one row per stored sample, events as comment lines.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace exosc
