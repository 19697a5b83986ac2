#include "exosc/ode.hpp"

#include <iomanip>

namespace exosc {

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw Error(Errc::DomainError, "tolerances must be positive");
  if (max_steps <= 0) throw Error(Errc::DomainError, "max_steps must be positive");
  if (!(h_max > 0.0)) throw Error(Errc::DomainError, "h_max must be positive");
  if (!(event_time_tol > 0.0)) throw Error(Errc::DomainError, "event_time_tol must be positive");
}

namespace {

VecN<2> to_vec(State2 s) { return {s.x, s.y}; }
State2 to_state(const VecN<2>& v) { return {v[0], v[1]}; }

}  // namespace

Trajectory integrate(const FieldFn& field, State2 s0, double t0, double t1, const IntegratorConfig& cfg,
                     const std::vector<EventSpec>& events) {
  std::vector<EventSpecN<2>> ev;
  ev.reserve(events.size());
  for (const auto& e : events) {
    auto g = e.g;
    ev.push_back({e.event_id, [g](const VecN<2>& v) { return g(to_state(v)); }, e.direction, e.terminal});
  }
  auto f = [&field](const VecN<2>& v) {
    const FieldValue d = field(to_state(v));
    return VecN<2>{d.dx, d.dy};
  };
  IntegratorConfig c = cfg;
  c.record = true;
  auto tr = integrate_n<2>(f, to_vec(s0), t0, t1, c, ev);

  Trajectory out;
  out.times = std::move(tr.times);
  out.states.reserve(tr.states.size());
  for (const auto& v : tr.states) out.states.push_back(to_state(v));
  for (const auto& h : tr.events) out.events.push_back({h.index, h.id, h.t, to_state(h.state)});
  out.stopped_by_event = tr.stopped_by_event;
  return out;
}

State2 flow_map(const FieldFn& field, State2 s0, double T, const IntegratorConfig& cfg) {
  if (T == 0.0) return s0;
  auto f = [&field](const VecN<2>& v) {
    const FieldValue d = field(to_state(v));
    return VecN<2>{d.dx, d.dy};
  };
  IntegratorConfig c = cfg;
  c.record = false;
  c.sample_dt = 0.0;
  return to_state(integrate_n<2>(f, to_vec(s0), 0.0, T, c).final_state);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << std::setprecision(17);
  os << "t,x,y\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    os << tr.times[i] << ',' << tr.states[i].x << ',' << tr.states[i].y << '\n';
  for (const auto& e : tr.events)
    os << "# event," << e.event_id << ',' << e.t << ',' << e.state.x << ',' << e.state.y << '\n';
}

}  // namespace exosc
