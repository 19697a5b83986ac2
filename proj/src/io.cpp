#include "exosc/io.hpp"

#include <cmath>
#include <limits>

#include "exosc/error.hpp"

namespace exosc {

namespace {

// JSON has no NaN/inf; they are written as null and read back as NaN.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::DomainError, std::string("missing JSON key '") + key + "'");
  return j.at(key);
}

double get_num(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw Error(Errc::DomainError, std::string("JSON key '") + key + "' is not a number");
  return v.get<double>();
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::DomainError, std::string("JSON key '") + key + "': " + e.what());
  }
}

Json polyline(const Polyline& pl) {
  Json a = Json::array();
  for (const auto& s : pl) a.push_back({s.x, s.y});
  return a;
}

Polyline polyline_from(const Json& a) {
  if (!a.is_array()) throw Error(Errc::DomainError, "points must be an array");
  Polyline pl;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw Error(Errc::DomainError, "point must be [x, y]");
    pl.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pl;
}

Json eigs(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

std::vector<Complex> eigs_from(const Json& a) {
  std::vector<Complex> v;
  for (const auto& z : a) v.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return v;
}

}  // namespace

Json to_json(const SystemParams& p) {
  Json j;
  j["system"] = system_name(p.system);
  if (p.system == System::Hester)
    j["params"] = {{"alpha", p.alpha}, {"mu", p.mu}, {"kappa", p.kappa}, {"gamma", p.gamma}};
  else
    j["params"] = {{"a", p.a}, {"b", p.b}};
  return j;
}

SystemParams system_params_from_json(const Json& j) {
  const System s = parse_system(get_as<std::string>(j, "system"));
  const Json& q = at(j, "params");
  SystemParams p = s == System::Hester
                       ? SystemParams::hester(HesterParams(get_num(q, "alpha"), get_num(q, "mu"), get_num(q, "kappa"),
                                                           get_num(q, "gamma")))
                       : SystemParams::corbeiller(CorbeillerParams(get_num(q, "a"), get_num(q, "b")));
  return p;
}

Json to_json(const SingularCycle& c) {
  Json j = to_json(c.params);
  Json segs = Json::array();
  for (const auto& s : c.segments) segs.push_back({{"label", s.label}, {"points", polyline(s.points)}});
  j["segments"] = segs;
  return j;
}

SingularCycle singular_cycle_from_json(const Json& j) {
  SingularCycle c{system_params_from_json(j), {}};
  for (const auto& s : at(j, "segments")) c.segments.push_back({get_as<std::string>(s, "label"), polyline_from(at(s, "points"))});
  return c;
}

Json to_json(const LimitCycle& c) {
  Json j = to_json(c.params);
  j["eps"] = c.eps;
  j["delta"] = c.delta;
  j["fixed_point_x"] = num(c.fixed_point_x);
  j["fixed_point_residual"] = num(c.fixed_point_residual);
  j["period_t1"] = num(c.period);
  j["period_t"] = num(c.period_original);
  j["floquet"] = num(c.floquet);
  j["floquet_noise_floor_flag"] = c.floquet_floor_flag;
  j["log_floquet_divergence"] = num(c.log_floquet_divergence);
  j["iterations"] = c.iterations;
  j["points"] = polyline(c.points);
  return j;
}

LimitCycle limit_cycle_from_json(const Json& j) {
  LimitCycle c;
  c.params = system_params_from_json(j);
  c.eps = get_num(j, "eps");
  c.delta = get_num(j, "delta");
  c.fixed_point_x = get_num(j, "fixed_point_x");
  c.fixed_point_residual = get_num(j, "fixed_point_residual");
  c.period = get_num(j, "period_t1");
  c.period_original = get_num(j, "period_t");
  c.floquet = get_num(j, "floquet");
  c.floquet_floor_flag = get_as<bool>(j, "floquet_noise_floor_flag");
  c.log_floquet_divergence = get_num(j, "log_floquet_divergence");
  c.iterations = get_as<int>(j, "iterations");
  c.points = polyline_from(at(j, "points"));
  return c;
}

Json to_json(const ConvergenceReport& r) {
  Json j = to_json(r.params);
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"eps", row.eps},
                    {"ok", row.ok},
                    {"error", row.error},
                    {"hausdorff", num(row.hausdorff)},
                    {"period", num(row.period)},
                    {"period_t", num(row.period_original)},
                    {"log_floquet", num(row.log_floquet)},
                    {"floor_flag", row.floor_flag},
                    {"log_floquet_divergence", num(row.log_floquet_divergence)},
                    {"fixed_point_x", num(row.fixed_point_x)}});
  j["rows"] = rows;
  return j;
}

ConvergenceReport convergence_report_from_json(const Json& j) {
  ConvergenceReport r;
  r.params = system_params_from_json(j);
  for (const auto& x : at(j, "rows")) {
    ConvergenceRow row;
    row.eps = get_num(x, "eps");
    row.ok = get_as<bool>(x, "ok");
    row.error = get_as<std::string>(x, "error");
    row.hausdorff = get_num(x, "hausdorff");
    row.period = get_num(x, "period");
    row.period_original = get_num(x, "period_t");
    row.log_floquet = get_num(x, "log_floquet");
    row.floor_flag = get_as<bool>(x, "floor_flag");
    row.log_floquet_divergence = get_num(x, "log_floquet_divergence");
    row.fixed_point_x = get_num(x, "fixed_point_x");
    r.rows.push_back(row);
  }
  return r;
}

Json catalog_to_json(const std::vector<EquilibriumRecord>& recs) {
  Json j = Json::object();
  for (const auto& r : recs) {
    Json e;
    e["label"] = r.label;
    e["point"] = r.point;
    e["analytic_eigs"] = eigs(r.lemma_eigs);
    e["derived_eigs"] = eigs(r.derived_eigs);
    e["numeric_eigs"] = eigs(r.numeric_eigs);
    e["classification"] = r.classification;
    e["max_mismatch"] = num(r.max_mismatch);
    e["max_mismatch_derived"] = num(r.max_mismatch_derived);
    j[chart_name(r.chart)].push_back(e);
  }
  return j;
}

std::vector<EquilibriumRecord> catalog_from_json(const Json& j) {
  std::vector<EquilibriumRecord> out;
  if (!j.is_object()) throw Error(Errc::DomainError, "catalog must be an object keyed by chart");
  for (const auto& [name, list] : j.items()) {
    const ChartId c = parse_chart(name);
    for (const auto& e : list) {
      EquilibriumRecord r;
      r.chart = c;
      r.label = get_as<std::string>(e, "label");
      r.point = get_as<std::vector<double>>(e, "point");
      r.lemma_eigs = eigs_from(at(e, "analytic_eigs"));
      r.derived_eigs = eigs_from(at(e, "derived_eigs"));
      r.numeric_eigs = eigs_from(at(e, "numeric_eigs"));
      r.classification = get_as<std::string>(e, "classification");
      r.max_mismatch = get_num(e, "max_mismatch");
      r.max_mismatch_derived = get_num(e, "max_mismatch_derived");
      out.push_back(std::move(r));
    }
  }
  return out;
}

Json to_json(const CheckResult& r) {
  return {{"category", r.category}, {"name", r.name},           {"chart", r.chart},  {"point", r.point},
          {"mismatch", num(r.mismatch)}, {"tolerance", r.tolerance}, {"passed", r.passed}};
}

CheckResult check_result_from_json(const Json& j) {
  CheckResult r;
  r.category = get_as<std::string>(j, "category");
  r.name = get_as<std::string>(j, "name");
  r.chart = get_as<std::string>(j, "chart");
  r.point = get_as<std::vector<double>>(j, "point");
  r.mismatch = get_num(j, "mismatch");
  r.tolerance = get_num(j, "tolerance");
  r.passed = get_as<bool>(j, "passed");
  return r;
}

Json trajectory_summary(const SystemParams& p, double eps, const Trajectory& tr) {
  Json j = to_json(p);
  j["eps"] = eps;
  const State2 eq = equilibrium(p, Epsilon(eps));
  j["equilibrium"] = {eq.x, eq.y};
  j["final_time"] = tr.final_time();
  j["final_state"] = {tr.final_state().x, tr.final_state().y};
  j["samples"] = tr.times.size();
  Json ev = Json::array();
  for (const auto& e : tr.events) ev.push_back({{"id", e.event_id}, {"t", e.t}, {"x", e.state.x}, {"y", e.state.y}});
  j["events"] = ev;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace exosc
