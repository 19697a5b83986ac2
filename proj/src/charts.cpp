#include "exosc/charts.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "exosc/error.hpp"
#include "exosc/ode.hpp"
#include "exosc/singular.hpp"
#include "exosc/slowmf.hpp"

namespace exosc {

namespace {

using Vec = std::vector<double>;

// 'S' signed coordinate, 'R' radius or eps-like (closed half line).
struct ChartInfo {
  ChartId id;
  const char* name;
  std::vector<std::string> coords;
  std::string kinds;
};

const std::vector<ChartInfo>& chart_table() {
  static const std::vector<ChartInfo> t = {
      {ChartId::K1, "K1", {"x", "r1", "eps1"}, "SRR"},
      {ChartId::K2, "K2", {"x", "y2", "r2"}, "SSR"},
      {ChartId::K3, "K3", {"x", "r3", "eps3"}, "SRR"},
      {ChartId::ExtK3, "ExtK3", {"x", "r", "eps", "q"}, "SRRR"},
      {ChartId::FrakK1, "FrakK1", {"x", "r1", "eps", "rho1"}, "SRRR"},
      {ChartId::CalK1, "CalK1", {"r1", "eps", "rho1", "nu1"}, "RRRR"},
      {ChartId::CalK2, "CalK2", {"x2", "r2", "eps", "nu2"}, "SRRR"},
      {ChartId::CalK2Q, "CalK2Q", {"x2", "r2", "eps"}, "SRR"},
      {ChartId::TildeK1, "TildeK1", {"x1", "eps1", "sigma1"}, "SRR"},
      {ChartId::TildeK2, "TildeK2", {"x2", "r2", "sigma2"}, "SRR"},
      {ChartId::HatK31, "HatK31", {"rhat1", "sigma", "shat1"}, "RRR"},
      {ChartId::HatK32, "HatK32", {"xhat2", "sigma", "shat2"}, "SRR"},
      {ChartId::K11, "K11", {"r11", "eps1", "s1"}, "RRR"},
      {ChartId::K12, "K12", {"x2", "eps1", "s2"}, "SRR"},
      {ChartId::K21, "K21", {"y2", "r21", "s1"}, "SRR"},
      {ChartId::K22, "K22", {"x2", "y2", "s2"}, "SSR"},
      {ChartId::K31, "K31", {"r31", "eps3", "s1"}, "RRR"},
      {ChartId::K32, "K32", {"x2", "eps3", "s2"}, "SRR"},
  };
  return t;
}

const ChartInfo& info(ChartId c) { return chart_table()[static_cast<std::size_t>(c)]; }

Vec field(const CorbeillerParams& prm, ChartId c, const Vec& v) {
  const double A = prm.a, B = prm.b;
  switch (c) {
    case ChartId::K1: {
      const double x = v[0], r1 = v[1], e1 = v[2];
      const double F = x + B * r1 * (2.0 - flat_exp(e1));
      return {r1 * (A - r1), r1 * F, -e1 * F};
    }
    case ChartId::K2: {
      const double x = v[0], y2 = v[1], r2 = v[2];
      const double sig = logistic_neg(y2);
      return {r2 * (r2 * y2 + A) * sig, (-x + 2.0 * B * r2 * y2) * sig - B * r2 * y2 * (1.0 - sig), 0.0};
    }
    case ChartId::K3: {
      const double x = v[0], r3 = v[1], e3 = v[2];
      const double E = flat_exp(e3);
      const double Z = B * r3 + E * (x - 2.0 * B * r3);
      return {r3 * E * (A + r3), -r3 * Z, e3 * Z};
    }
    case ChartId::ExtK3: {
      const double x = v[0], r = v[1], e = v[2], q = v[3];
      const double G = B * r + q * (x - 2.0 * B * r);
      return {r * e * q * (A + r), -r * e * G, e * e * G, q * G};
    }
    case ChartId::FrakK1: {
      const double x = v[0], r1 = v[1], e = v[2], p = v[3];
      const double H = x + B * r1 * (1.0 - 2.0 * p);
      return {p * r1 * e * (A + p * r1), -r1 * (1.0 + e) * H, e * e * H, p * H};
    }
    case ChartId::CalK1: {
      const double r1 = v[0], e = v[1], p = v[2], n = v[3];
      const double J = 1.0 - B * r1 * (1.0 - 2.0 * n * p);
      const double K = p * r1 * e * (A + p * r1 * n * n);
      return {r1 * ((1.0 + e) * J + K), -e * e * J, -p * (J - K), -n * K};
    }
    case ChartId::CalK2:
    case ChartId::CalK2Q: {
      const double x2 = v[0], r2 = v[1], e = v[2];
      const double n = c == ChartId::CalK2 ? v[3] : flat_exp(e);
      const double M = x2 + B * r2 * (1.0 - 2.0 * n);
      Vec out = {-x2 * M + r2 * e * (A + r2 * n * n), -r2 * (2.0 + e) * M, e * e * M};
      if (c == ChartId::CalK2) out.push_back(n * M);
      return out;
    }
    case ChartId::TildeK1: {
      const double x1 = v[0], e1 = v[1], s = v[2];
      const double E = flat_exp(s * e1);
      const double N = x1 + B * (1.0 - 2.0 * E);
      return {e1 * (A + s * E * E) + x1 * (1.0 + s * e1) * N, 2.0 * e1 * (1.0 + s * e1) * N,
              -s * (2.0 + s * e1) * N};
    }
    case ChartId::TildeK2: {
      const double x2 = v[0], r2 = v[1], s = v[2];
      const double E = flat_exp(s);
      const double P = x2 + B * r2 * (1.0 - 2.0 * E);
      return {r2 * (A + s * r2 * E * E) - x2 * (1.0 + s) * P, -2.0 * r2 * (1.0 + s) * P, s * s * P};
    }
    case ChartId::HatK31: {
      const double r = v[0], s = v[1], h = v[2];
      const double E = flat_exp(s);
      const double Aa = A + s * r * h * h * E * E;
      const double S = 1.0 + B * r * h * (1.0 - 2.0 * E);
      return {-2.0 * r * r * Aa, s * s * S, -h * (-r * Aa + (1.0 + s) * S)};
    }
    case ChartId::HatK32: {
      // Pushed forward from TildeK2 and divided by shat2.
      const double x = v[0], s = v[1], h = v[2];
      const double E = flat_exp(s);
      const double U = x + B * h * (1.0 - 2.0 * E);
      return {A + s * h * h * E * E, s * s * U, -h * (1.0 + s) * U};
    }
    case ChartId::K11: {
      const double r = v[0], e1 = v[1], s = v[2];
      const double W = 1.0 + B * s * r * (2.0 - flat_exp(e1));
      const double Aa = A - r * s * s;
      return {r * (W - 2.0 * r * Aa), -e1 * W, s * r * Aa};
    }
    case ChartId::K12: {
      const double x2 = v[0], e1 = v[1], s = v[2];
      const double V = x2 + B * s * (2.0 - flat_exp(e1));
      return {A - s * s - 0.5 * x2 * V, -e1 * V, 0.5 * s * V};
    }
    case ChartId::K21: {
      // Rederived with the single factor r2; see the decisions ledger.
      const double y2 = v[0], r = v[1], s = v[2];
      const double Aa = A + s * s * r * y2;
      return {-1.0 + B * s * r * y2 * (2.0 - std::exp(y2)), -2.0 * r * r * Aa, s * r * Aa};
    }
    case ChartId::K22: {
      const double x2 = v[0], y2 = v[1], s = v[2];
      return {A + s * s * y2, -x2 + B * s * y2 * (2.0 - std::exp(y2)), 0.0};
    }
    case ChartId::K31: {
      const double r = v[0], e3 = v[1], s = v[2];
      const double E = flat_exp(e3);
      return {-r * (B * r * s + E * (1.0 - 2.0 * B * r * s + 2.0 * r * (A + r * s * s))),
              e3 * (B * r * s + E * (1.0 - 2.0 * B * r * s)), s * r * E * (A + s * s * r)};
    }
    case ChartId::K32: {
      const double x2 = v[0], e3 = v[1], s = v[2];
      const double E = flat_exp(e3);
      const double Y = B * s + E * (x2 - 2.0 * B * s);
      return {E * (A + s * s) + 0.5 * x2 * Y, e3 * Y, -0.5 * s * Y};
    }
  }
  throw Error(Errc::InvalidChartPoint, "unknown chart");
}

// ---- transitions ---------------------------------------------------------

using MapFn = std::function<Vec(const Vec&)>;
using PredFn = std::function<bool(const Vec&)>;

struct TransitionImpl {
  TransitionSpec spec;
  PredFn overlap;
  MapFn map;
};

bool fin(double v) { return std::isfinite(v); }

// Matching maps need e^{1/sigma} finite.
constexpr double kMinMatchingSigma = 1.0 / 600.0;

const std::vector<TransitionImpl>& transition_table() {
  using C = ChartId;
  static const std::vector<TransitionImpl> t = {
      // cylindrical charts
      {{C::K2, C::K1, "kappa12"}, [](const Vec& v) { return v[1] < 0.0; },
       [](const Vec& v) { return Vec{v[0], -v[2] * v[1], -1.0 / v[1]}; }},
      {{C::K1, C::K2, "kappa21"}, [](const Vec& v) { return v[2] > 0.0; },
       [](const Vec& v) { return Vec{v[0], -1.0 / v[2], v[1] * v[2]}; }},
      {{C::K3, C::K2, "kappa23"}, [](const Vec& v) { return v[2] > 0.0; },
       [](const Vec& v) { return Vec{v[0], 1.0 / v[2], v[1] * v[2]}; }},
      {{C::K2, C::K3, "kappa32"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) { return Vec{v[0], v[2] * v[1], 1.0 / v[1]}; }},
      // cylinder of spheres
      {{C::CalK2, C::CalK1, "kappa12'"}, [](const Vec& v) { return v[0] < 0.0; },
       [](const Vec& v) { return Vec{-v[1] / v[0], v[2], -1.0 / v[0], -v[3] * v[0]}; }},
      {{C::CalK1, C::CalK2, "kappa21'"}, [](const Vec& v) { return v[2] > 0.0; },
       [](const Vec& v) { return Vec{-1.0 / v[2], v[0] / v[2], v[1], v[3] * v[2]}; }},
      // spherical blow-up of P_O
      {{C::TildeK2, C::TildeK1, "tilde-kappa12"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) { return Vec{v[0] / v[1], 1.0 / v[1], v[2] * v[1]}; }},
      {{C::TildeK1, C::TildeK2, "tilde-kappa21"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) { return Vec{v[0] / v[1], 1.0 / v[1], v[2] * v[1]}; }},
      // weighted blow-up of the line above P_O
      {{C::HatK32, C::HatK31, "hat-kappa3132"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) { return Vec{1.0 / (v[0] * v[0]), v[1], v[2] * v[0]}; }},
      {{C::HatK31, C::HatK32, "hat-kappa3231"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[0]);
         return Vec{1.0 / q, v[1], v[2] * q};
       }},
      // matching between the exponential and algebraic regimes
      {{C::HatK31, C::K31, "matching"}, [](const Vec& v) { return v[1] > kMinMatchingSigma; },
       [](const Vec& v) {
         const double s = v[1];
         return Vec{v[0] / s, s, s * std::exp(-1.0 / s) * v[2]};
       }},
      {{C::K31, C::HatK31, "matching"}, [](const Vec& v) { return v[1] > kMinMatchingSigma; },
       [](const Vec& v) {
         const double s = v[1];
         return Vec{s * v[0], s, v[2] * std::exp(1.0 / s) / s};
       }},
      {{C::HatK32, C::K32, "matching"}, [](const Vec& v) { return v[1] > kMinMatchingSigma; },
       [](const Vec& v) {
         const double s = v[1], q = std::sqrt(s);
         return Vec{q * v[0], s, q * std::exp(-1.0 / s) * v[2]};
       }},
      {{C::K32, C::HatK32, "matching"}, [](const Vec& v) { return v[1] > kMinMatchingSigma; },
       [](const Vec& v) {
         const double s = v[1], q = std::sqrt(s);
         return Vec{v[0] / q, s, v[2] * std::exp(1.0 / s) / q};
       }},
      // vertical cylinder
      {{C::K12, C::K11, "kappa1112"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) { return Vec{1.0 / (v[0] * v[0]), v[1], v[2] * v[0]}; }},
      {{C::K11, C::K12, "kappa1112"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[0]);
         return Vec{1.0 / q, v[1], v[2] * q};
       }},
      {{C::K21, C::K11, "kappa1121"}, [](const Vec& v) { return v[0] < 0.0; },
       [](const Vec& v) { return Vec{-v[1] * v[0], -1.0 / v[0], v[2]}; }},
      {{C::K11, C::K21, "kappa1121"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) { return Vec{-1.0 / v[1], v[0] * v[1], v[2]}; }},
      {{C::K22, C::K11, "kappa1122"}, [](const Vec& v) { return v[0] > 0.0 && v[1] < 0.0; },
       [](const Vec& v) { return Vec{-v[1] / (v[0] * v[0]), -1.0 / v[1], v[2] * v[0]}; }},
      {{C::K11, C::K22, "kappa1122"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[0] * v[1]);
         return Vec{1.0 / q, -1.0 / v[1], v[2] * q};
       }},
      {{C::K21, C::K12, "kappa1221"}, [](const Vec& v) { return v[0] < 0.0 && v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(-v[1] * v[0]);
         return Vec{1.0 / q, -1.0 / v[0], v[2] * q};
       }},
      {{C::K12, C::K21, "kappa1221"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) { return Vec{-1.0 / v[1], v[1] / (v[0] * v[0]), v[2] * v[0]}; }},
      {{C::K22, C::K12, "derived"}, [](const Vec& v) { return v[1] < 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(-v[1]);
         return Vec{v[0] / q, -1.0 / v[1], v[2] * q};
       }},
      {{C::K12, C::K22, "derived"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[1]);
         return Vec{v[0] / q, -1.0 / v[1], v[2] * q};
       }},
      {{C::K22, C::K21, "kappa2122"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) { return Vec{v[1], 1.0 / (v[0] * v[0]), v[2] * v[0]}; }},
      {{C::K21, C::K22, "kappa2122"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[1]);
         return Vec{1.0 / q, v[0], v[2] * q};
       }},
      {{C::K31, C::K21, "kappa2131"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) { return Vec{1.0 / v[1], v[0] * v[1], v[2]}; }},
      {{C::K21, C::K31, "kappa2131"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) { return Vec{v[1] * v[0], 1.0 / v[0], v[2]}; }},
      {{C::K32, C::K21, "kappa2132"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) { return Vec{1.0 / v[1], v[1] / (v[0] * v[0]), v[2] * v[0]}; }},
      {{C::K21, C::K32, "kappa2132"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[1] * v[0]);
         return Vec{1.0 / q, 1.0 / v[0], v[2] * q};
       }},
      {{C::K31, C::K22, "kappa2231"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[0] * v[1]);
         return Vec{1.0 / q, 1.0 / v[1], v[2] * q};
       }},
      {{C::K22, C::K31, "kappa2231"}, [](const Vec& v) { return v[0] > 0.0 && v[1] > 0.0; },
       [](const Vec& v) { return Vec{v[1] / (v[0] * v[0]), 1.0 / v[1], v[2] * v[0]}; }},
      {{C::K32, C::K31, "kappa3132"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) { return Vec{1.0 / (v[0] * v[0]), v[1], v[2] * v[0]}; }},
      {{C::K31, C::K32, "kappa3132"}, [](const Vec& v) { return v[0] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[0]);
         return Vec{1.0 / q, v[1], v[2] * q};
       }},
      {{C::K32, C::K22, "derived"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[1]);
         return Vec{v[0] / q, 1.0 / v[1], v[2] * q};
       }},
      {{C::K22, C::K32, "derived"}, [](const Vec& v) { return v[1] > 0.0; },
       [](const Vec& v) {
         const double q = std::sqrt(v[1]);
         return Vec{v[0] / q, 1.0 / v[1], v[2] * q};
       }},
  };
  return t;
}

const TransitionImpl* find_transition(ChartId from, ChartId to) {
  for (const auto& t : transition_table())
    if (t.spec.from == from && t.spec.to == to) return &t;
  return nullptr;
}

std::string fmt_point(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

}  // namespace

const std::vector<ChartId>& all_charts() {
  static const std::vector<ChartId> ids = [] {
    std::vector<ChartId> v;
    for (const auto& c : chart_table()) v.push_back(c.id);
    return v;
  }();
  return ids;
}

const char* chart_name(ChartId c) { return info(c).name; }

ChartId parse_chart(const std::string& s) {
  for (const auto& c : chart_table())
    if (s == c.name) return c.id;
  throw Error(Errc::InvalidChartPoint, "unknown chart '" + s + "'");
}

std::size_t chart_arity(ChartId c) { return info(c).coords.size(); }

const std::vector<std::string>& chart_coords(ChartId c) { return info(c).coords; }

double flat_exp(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

void check_chart_point(const ChartPoint& p) {
  const ChartInfo& ci = info(p.chart);
  if (p.c.size() != ci.coords.size())
    throw Error(Errc::InvalidChartPoint, std::string(ci.name) + " expects " + std::to_string(ci.coords.size()) +
                                             " coordinates, got " + std::to_string(p.c.size()));
  for (std::size_t i = 0; i < p.c.size(); ++i) {
    if (!std::isfinite(p.c[i]))
      throw Error(Errc::InvalidChartPoint, std::string(ci.name) + ": non-finite " + ci.coords[i]);
    if (ci.kinds[i] == 'R' && p.c[i] < 0.0)
      throw Error(Errc::InvalidChartPoint, std::string(ci.name) + ": " + ci.coords[i] + " must be >= 0");
  }
}

std::vector<double> eval_chart_field(const CorbeillerParams& prm, const ChartPoint& p) {
  check_chart_point(p);
  return field(prm, p.chart, p.c);
}

std::vector<double> eval_chart_field_unchecked(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x) {
  return field(prm, c, x);
}

const std::vector<TransitionSpec>& transitions() {
  static const std::vector<TransitionSpec> specs = [] {
    std::vector<TransitionSpec> v;
    for (const auto& t : transition_table()) v.push_back(t.spec);
    return v;
  }();
  return specs;
}

bool in_overlap(ChartId from, ChartId to, const std::vector<double>& x) {
  const TransitionImpl* t = find_transition(from, to);
  if (!t || x.size() != chart_arity(from)) return false;
  try {
    check_chart_point({from, x});
  } catch (const Error&) {
    return false;
  }
  return t->overlap(x);
}

ChartPoint chart_transition(ChartId from, ChartId to, const ChartPoint& p) {
  if (p.chart != from) throw Error(Errc::InvalidChartPoint, "point is not in chart " + std::string(chart_name(from)));
  check_chart_point(p);
  const TransitionImpl* t = find_transition(from, to);
  if (!t)
    throw Error(Errc::OutsideOverlap,
                std::string("no transition from ") + chart_name(from) + " to " + chart_name(to));
  if (!t->overlap(p.c))
    throw Error(Errc::OutsideOverlap, std::string(chart_name(from)) + " point " + fmt_point(p.c) +
                                          " is outside the overlap with " + chart_name(to));
  ChartPoint out{to, t->map(p.c)};
  for (double v : out.c)
    if (!fin(v)) throw Error(Errc::OutsideOverlap, "transition produced a non-finite coordinate");
  return out;
}

std::optional<ChartPoint> parent_point(const ChartPoint& p) {
  using C = ChartId;
  const Vec& v = p.c;
  switch (p.chart) {
    case C::K1:
    case C::K2:
    case C::K3: return std::nullopt;
    case C::ExtK3: return ChartPoint{C::K3, {v[0], v[1], v[2]}};
    case C::FrakK1: return ChartPoint{C::ExtK3, {v[0], v[3] * v[1], v[2], v[3]}};
    case C::CalK1: return ChartPoint{C::FrakK1, {-v[3], v[3] * v[0], v[1], v[3] * v[2]}};
    case C::CalK2: return ChartPoint{C::FrakK1, {v[3] * v[0], v[3] * v[1], v[2], v[3]}};
    case C::CalK2Q: return ChartPoint{C::CalK2, {v[0], v[1], v[2], flat_exp(v[2])}};
    case C::TildeK1: return ChartPoint{C::CalK2Q, {v[2] * v[0], v[2], v[2] * v[1]}};
    case C::TildeK2: return ChartPoint{C::CalK2Q, {v[2] * v[0], v[2] * v[1], v[2]}};
    case C::HatK31: return ChartPoint{C::TildeK2, {v[2], v[2] * v[2] * v[0], v[1]}};
    case C::HatK32: return ChartPoint{C::TildeK2, {v[2] * v[0], v[2] * v[2], v[1]}};
    case C::K11: return ChartPoint{C::K1, {v[2], v[2] * v[2] * v[0], v[1]}};
    case C::K12: return ChartPoint{C::K1, {v[2] * v[0], v[2] * v[2], v[1]}};
    case C::K21: return ChartPoint{C::K2, {v[2], v[0], v[2] * v[2] * v[1]}};
    case C::K22: return ChartPoint{C::K2, {v[2] * v[0], v[1], v[2] * v[2]}};
    case C::K31: return ChartPoint{C::K3, {v[2], v[2] * v[2] * v[0], v[1]}};
    case C::K32: return ChartPoint{C::K3, {v[2] * v[0], v[2] * v[2], v[1]}};
  }
  return std::nullopt;
}

ChartPoint express_in(const ChartPoint& p, ChartId ancestor) {
  check_chart_point(p);
  ChartPoint cur = p;
  while (cur.chart != ancestor) {
    auto up = parent_point(cur);
    if (!up)
      throw Error(Errc::DomainError,
                  std::string(chart_name(ancestor)) + " is not an ancestor of " + chart_name(p.chart));
    cur = *up;
  }
  return cur;
}

Original blow_down(const ChartPoint& p) {
  check_chart_point(p);
  ChartPoint cur = p;
  while (auto up = parent_point(cur)) cur = *up;
  const Vec& v = cur.c;
  switch (cur.chart) {
    case ChartId::K1: return {v[0], -v[1], v[1] * v[2]};
    case ChartId::K2: return {v[0], v[2] * v[1], v[2]};
    default: return {v[0], v[1], v[1] * v[2]};  // K3
  }
}

// ---- equilibria ------------------------------------------------------------

std::vector<Complex> sorted_eigs(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

std::vector<std::vector<double>> chart_jacobian(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x,
                                                double h) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec fp = field(prm, c, xp), fm = field(prm, c, xm);
    for (std::size_t i = 0; i < n; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * h);
  }
  return J;
}

std::vector<Complex> numeric_spectrum(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x) {
  const auto J = chart_jacobian(prm, c, x);
  const auto n = static_cast<Eigen::Index>(J.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return sorted_eigs(out);
}

double spectrum_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto sa = sorted_eigs(a), sb = sorted_eigs(b);
  double m = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) m = std::max(m, std::abs(sa[i] - sb[i]));
  return m;
}

std::vector<EquilibriumRecord> equilibria_catalog(const CorbeillerParams& prm) {
  using C = ChartId;
  const double a = prm.a, b = prm.b;
  auto R = [](std::initializer_list<double> xs) {
    std::vector<Complex> v;
    for (double x : xs) v.emplace_back(x, 0.0);
    return v;
  };
  std::vector<EquilibriumRecord> recs;
  auto add = [&](C c, std::string label, Vec pt, std::vector<Complex> lemma, std::vector<Complex> derived,
                 std::string cls) {
    EquilibriumRecord r;
    r.chart = c;
    r.label = std::move(label);
    r.point = std::move(pt);
    r.lemma_eigs = sorted_eigs(std::move(lemma));
    r.derived_eigs = sorted_eigs(std::move(derived));
    r.classification = std::move(cls);
    recs.push_back(std::move(r));
  };

  for (double x : {-1.5, 0.7})
    add(C::K1, "l_s1", {x, 0.0, 0.0}, R({0.0, x, -x}), R({0.0, x, -x}), "saddle on a line of equilibria");
  add(C::K1, "L1", {0.0, 0.0, 0.5}, R({0, 0, 0}), R({0, 0, 0}), "fully non-hyperbolic");
  add(C::K3, "l_e3", {-1.2, 0.0, 0.0}, R({0, 0, 0}), R({0, 0, 0}), "fully non-hyperbolic");
  add(C::K3, "L3", {0.0, 0.0, 0.3}, R({0, 0, 0}), R({0, 0, 0}), "fully non-hyperbolic");

  for (auto [x, rho] : {std::pair{-1.0, 0.0}, std::pair{-0.6, 0.1}}) {
    const double f = 1.0 - 2.0 * rho;
    add(C::FrakK1, "C1", {x, -x / (b * f), 0.0, rho}, R({x / (b * f), 0, 0, 0}), R({x / f, 0, 0, 0}),
        "normally hyperbolic attracting");
  }
  {
    const double x = -1.0, e = 0.05;
    add(C::FrakK1, "S1", {x, -x / b, e, 0.0}, R({x / b, 0, 0, 0}), R({x * (1.0 + e), 0, 0, 0}),
        "normally hyperbolic attracting");
  }
  for (double x : {-2.0, 1.0})
    add(C::FrakK1, "l_e1", {x, 0.0, 0.0, 0.0}, R({0.0, -x, 0.0, x}), R({0.0, -x, 0.0, x}),
        "partially hyperbolic saddle");

  add(C::CalK1, "P_L", {1.0 / b, 0.0, 0.0, 0.0}, R({-1, 0, 0, 0}), R({-1, 0, 0, 0}), "partially hyperbolic");
  add(C::CalK1, "l'_e1", {0.0, 0.0, 0.0, 0.5}, R({1, 0, -1, 0}), R({1, 0, -1, 0}), "partially hyperbolic saddle");
  {
    const double x2 = -0.5;
    add(C::CalK2Q, "N'_2", {x2, -x2 / b, 0.0}, R({x2, 0, 0}), R({x2, 0, 0}), "normally hyperbolic attracting");
  }
  add(C::TildeK1, "p_l", {-b, 0.0, 0.0}, R({-b, 0, 0}), R({-b, 0, 0}), "partially hyperbolic");
  add(C::TildeK1, "p_r", {0.0, 0.0, 0.0}, R({b, 2 * b, -2 * b}), R({b, 2 * b, -2 * b}), "hyperbolic saddle");
  add(C::HatK31, "p_s", {0.0, 0.0, 0.0}, R({-1, 0, 0}), R({-1, 0, 0}), "partially hyperbolic");
  {
    const double s2a = std::sqrt(2.0 * a), sa2 = std::sqrt(a / 2.0);
    add(C::K12, "q_i", {-s2a, 0.0, 0.0}, R({sa2, s2a, -sa2}), R({s2a, s2a, -sa2}), "hyperbolic saddle");
    add(C::K12, "q_o", {s2a, 0.0, 0.0}, R({-sa2, -s2a, sa2}), R({-s2a, -s2a, sa2}), "hyperbolic saddle");
  }
  add(C::K11, "q_s", {0.0, 0.0, 0.0}, R({1, -1, 0}), R({1, -1, 0}), "partially hyperbolic saddle");

  for (auto& r : recs) {
    r.numeric_eigs = numeric_spectrum(prm, r.chart, r.point);
    r.max_mismatch = spectrum_mismatch(r.numeric_eigs, r.lemma_eigs);
    r.max_mismatch_derived = spectrum_mismatch(r.numeric_eigs, r.derived_eigs);
  }
  return recs;
}

std::vector<EquilibriumRecord> equilibria_catalog(ChartId chart, const CorbeillerParams& prm) {
  std::vector<EquilibriumRecord> out;
  for (auto& r : equilibria_catalog(prm))
    if (r.chart == chart) out.push_back(std::move(r));
  return out;
}

// ---- singular cycle in the blown-up space ----------------------------------

double center_manifold_slope(const CorbeillerParams& prm) {
  // Null vector of the Jacobian at p_l restricted to the (x1, eps1) plane.
  const auto J = chart_jacobian(prm, ChartId::TildeK1, {-prm.b, 0.0, 0.0});
  return -J[0][1] / J[0][0];
}

namespace {

std::vector<Vec> linspace_points(int n, const std::function<Vec(double)>& at, double lo, double hi) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(at(lo + (hi - lo) * i / (n - 1)));
  return pts;
}

template <std::size_t N>
Vec to_vec(const VecN<N>& s) {
  return Vec(s.begin(), s.end());
}

}  // namespace

std::vector<ChartSegment> blown_up_singular_segments(const CorbeillerParams& prm) {
  return blown_up_singular_segments(prm, drop_point_corbeiller(prm));
}

std::vector<ChartSegment> blown_up_singular_segments(const CorbeillerParams& prm, double x_d) {
  using C = ChartId;
  const double a = prm.a, b = prm.b;
  constexpr int n = 201;
  std::vector<ChartSegment> segs;

  // sinh grid so the fiber ends sit within 1e-7 of eps1 = 0 and eps3 = 0.
  const double tmax = std::asinh(1e7);
  segs.push_back({"Gamma2", C::K2,
                  linspace_points(n, [&](double t) { return Vec{x_d, std::sinh(t), 0.0}; }, -tmax, tmax)});
  segs.push_back({"Gamma3", C::FrakK1,
                  linspace_points(n, [&](double r1) { return Vec{x_d, r1, 0.0, 0.0}; }, 0.0, -x_d / b)});
  segs.push_back({"Gamma4", C::FrakK1,
                  linspace_points(n, [&](double x) { return Vec{x, -x / b, 0.0, 0.0}; }, x_d, 0.0)});
  segs.push_back({"Gamma5", C::CalK1,
                  linspace_points(n, [&](double rho) { return Vec{1.0 / b, 0.0, rho, 0.0}; }, 0.0, 1.0)});
  segs.push_back({"Gamma5", C::CalK2Q,
                  linspace_points(n, [&](double x2) { return Vec{x2, -x2 / b, 0.0}; }, -1.0, 0.0)});

  // Gamma6: shoot along the centre manifold of p_l inside sigma1 = 0.
  {
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-15;
    cfg.h_init = 1e-3;
    const double e0 = 1e-4;
    const double slope = center_manifold_slope(prm);
    auto f1 = [&](const VecN<3>& s) {
      const Vec d = field(prm, C::TildeK1, {s[0], s[1], s[2]});
      return VecN<3>{d[0], d[1], d[2]};
    };
    EventSpecN<3> reach{"eps1=1", [](const VecN<3>& s) { return s[1] - 1.0; }, Direction::Rising, true};
    auto t1 = integrate_n<3>(f1, VecN<3>{-b + slope * e0, e0, 0.0}, 0.0, 1e5, cfg, {reach});
    if (!t1.stopped_by_event) throw Error(Errc::IntegrationFailure, "centre manifold orbit did not reach eps1 = 1");
    std::vector<Vec> p1 = {Vec{-b, 0.0, 0.0}};
    for (std::size_t i = 0; i < t1.states.size() && t1.times[i] < t1.events.back().t; ++i)
      p1.push_back(to_vec(t1.states[i]));
    p1.push_back(to_vec(t1.events.back().state));
    segs.push_back({"Gamma6", C::TildeK1, p1});

    const ChartPoint start = chart_transition(C::TildeK1, C::TildeK2, {C::TildeK1, p1.back()});
    auto f2 = [&](const VecN<3>& s) {
      const Vec d = field(prm, C::TildeK2, {s[0], s[1], s[2]});
      return VecN<3>{d[0], d[1], d[2]};
    };
    EventSpecN<3> near{"p_o", [](const VecN<3>& s) { return std::hypot(s[0], s[1]) - 1e-7; }, Direction::Falling,
                       true};
    auto t2 = integrate_n<3>(f2, VecN<3>{start.c[0], start.c[1], 0.0}, 0.0, 1e10, cfg, {near});
    if (!t2.stopped_by_event) throw Error(Errc::IntegrationFailure, "centre manifold orbit did not approach p_o");
    std::vector<Vec> p2;
    for (std::size_t i = 0; i < t2.states.size() && t2.times[i] < t2.events.back().t; ++i)
      p2.push_back(to_vec(t2.states[i]));
    p2.push_back(to_vec(t2.events.back().state));
    p2.push_back({0.0, 0.0, 0.0});
    segs.push_back({"Gamma6", C::TildeK2, p2});
  }

  segs.push_back({"Gamma7", C::HatK31,
                  linspace_points(n, [](double s) { return Vec{0.0, s, 0.0}; }, 0.0, 1.0)});
  segs.push_back({"Gamma7", C::K31,
                  linspace_points(n, [](double e3) { return Vec{0.0, e3, 0.0}; }, 1.0, 10.0)});
  segs.push_back({"Gamma7", C::K21,
                  linspace_points(n, [](double y2) { return Vec{y2, 0.0, 0.0}; }, 0.1, -1.0)});
  segs.push_back({"Gamma7", C::K11,
                  linspace_points(n, [](double e1) { return Vec{0.0, e1, 0.0}; }, 1.0, 0.0)});
  segs.push_back({"Gamma8", C::K11,
                  linspace_points(n, [&](double r) { return Vec{r, 0.0, 0.0}; }, 0.0, 1.0 / (2.0 * a))});
  return segs;
}

void write_segments_csv(std::ostream& os, const std::vector<ChartSegment>& segs) {
  const auto old = os.precision(17);
  os << "segment,chart,index,c0,c1,c2,c3\n";
  for (const auto& s : segs) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      os << s.label << ',' << chart_name(s.chart) << ',' << i;
      for (std::size_t k = 0; k < 4; ++k) {
        os << ',';
        if (k < s.points[i].size()) os << s.points[i][k];
      }
      os << '\n';
    }
  }
  os.precision(old);
}

// ---- Pi^{1,4} ----------------------------------------------------------------

Pi14 pi14_transition(double delta, double r_in) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::DomainError, "delta must lie in (0,1)");
  if (!(r_in > 0.0) || !std::isfinite(r_in)) throw Error(Errc::DomainError, "r_in must be positive");
  const double W = lambert_w(1.0 / (r_in * delta));
  return {-1.0 / delta + W, 1.0 / W, r_in * delta * W};
}

Pi14 pi14_numeric(double delta, double r_in, double rtol) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::DomainError, "delta must lie in (0,1)");
  if (!(r_in > 0.0) || !std::isfinite(r_in)) throw Error(Errc::DomainError, "r_in must be positive");
  const double R5 = std::exp(-1.0 / delta);
  const VecN<3> s0{r_in, delta, R5};
  if (r_in == R5) return {0.0, delta, R5};
  auto f = [](const VecN<3>& s) { return VecN<3>{s[0] * (1.0 + s[1]), -s[1] * s[1], -s[2]}; };
  IntegratorConfig cfg;
  cfg.rtol = rtol;
  cfg.atol = 1e-300;
  cfg.h_init = 1e-4;
  cfg.record = false;
  cfg.event_time_tol = 1e-14;
  EventSpecN<3> hit{"r=R5", [R5](const VecN<3>& s) { return std::log(s[0] / R5); }, Direction::Any, true};
  // Backward in time the eps equation blows up at t = -1/delta.
  const double t_end = r_in < R5 ? 10.0 / delta + 200.0 : -(1.0 - 1e-9) / delta;
  auto tr = integrate_n<3>(f, s0, 0.0, t_end, cfg, {hit});
  if (!tr.stopped_by_event) throw Error(Errc::IntegrationFailure, "r did not reach R5");
  const auto& e = tr.events.back();
  return {e.t, e.state[1], e.state[2]};
}

// ---- invariant suite --------------------------------------------------------

namespace {

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Vec chart_point(ChartId c) {
    const ChartInfo& ci = info(c);
    Vec v;
    for (char k : ci.kinds) v.push_back(k == 'R' ? uni(0.05, 1.5) : uni(-2.0, 2.0));
    return v;
  }
};

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Angle between u and v; pi when either vanishes.
double angle(const Vec& u, const Vec& v) {
  const double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) return M_PI;
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = u[i] / nu - v[i] / nv;
    d += e * e;
  }
  return 2.0 * std::asin(std::min(1.0, std::sqrt(d) / 2.0));
}

struct Worst {
  double value = 0.0;
  Vec point;
  void see(double v, const Vec& p) {
    if (!(v <= value)) {
      value = v;
      point = p;
    }
  }
};

CheckResult make(std::string cat, std::string name, std::string chart, const Worst& w, double tol) {
  CheckResult r;
  r.category = std::move(cat);
  r.name = std::move(name);
  r.chart = std::move(chart);
  r.point = w.point;
  r.mismatch = w.value;
  r.tolerance = tol;
  r.passed = w.value <= tol;
  return r;
}

// Declared invariant sets: a point generator and the field components
// normal to the set.
struct InvariantSet {
  ChartId chart;
  std::string name;
  std::function<Vec(Sampler&)> point;
  std::function<Vec(const Vec& x, const Vec& f)> normal;
};

std::vector<InvariantSet> invariant_sets(const CorbeillerParams& prm) {
  using C = ChartId;
  const double a = prm.a;
  auto plane = [](C c, std::string name, std::size_t k) {
    return InvariantSet{c, std::move(name),
                        [c, k](Sampler& s) {
                          Vec v = s.chart_point(c);
                          v[k] = 0.0;
                          return v;
                        },
                        [k](const Vec&, const Vec& f) { return Vec{f[k]}; }};
  };
  auto line = [](C c, std::string name, std::size_t i, std::size_t j, Vec fixed = {}) {
    return InvariantSet{c, std::move(name),
                        [c, i, j, fixed](Sampler& s) {
                          Vec v = s.chart_point(c);
                          v[i] = fixed.empty() ? 0.0 : fixed[0];
                          v[j] = fixed.size() > 1 ? fixed[1] : 0.0;
                          return v;
                        },
                        [i, j](const Vec&, const Vec& f) { return Vec{f[i], f[j]}; }};
  };
  // Graph coordinate k = e^{-1/eps} with eps at index e.
  auto flat_graph = [](C c, std::string name, std::size_t k, std::size_t e) {
    return InvariantSet{c, std::move(name),
                        [c, k, e](Sampler& s) {
                          Vec v = s.chart_point(c);
                          v[k] = flat_exp(v[e]);
                          return v;
                        },
                        [k, e](const Vec& x, const Vec& f) {
                          const double g = flat_exp(x[e]);
                          return Vec{f[k] - g / (x[e] * x[e]) * f[e]};
                        }};
  };
  std::vector<InvariantSet> s;
  s.push_back(plane(C::K1, "eps1=0", 2));
  s.push_back(plane(C::K1, "r1=0", 1));
  s.push_back(plane(C::K3, "eps3=0", 2));
  s.push_back(plane(C::K3, "r3=0", 1));
  s.push_back(flat_graph(C::ExtK3, "Q", 3, 2));
  s.push_back(flat_graph(C::FrakK1, "Q1", 3, 2));
  s.push_back(plane(C::FrakK1, "eps=0", 2));
  s.push_back(plane(C::FrakK1, "rho1=0", 3));
  s.push_back(plane(C::FrakK1, "r1=0", 1));
  s.push_back(plane(C::CalK1, "eps=0", 1));
  s.push_back(plane(C::CalK1, "rho1=0", 2));
  s.push_back(plane(C::CalK1, "nu1=0", 3));
  s.push_back(plane(C::CalK1, "r1=0", 0));
  s.push_back(InvariantSet{C::CalK1, "Q1'",
                           [](Sampler& sm) {
                             Vec v = sm.chart_point(C::CalK1);
                             v[3] = flat_exp(v[1]) / v[2];
                             return v;
                           },
                           [](const Vec& x, const Vec& f) {
                             const double g = flat_exp(x[1]);
                             return Vec{f[3] * x[2] + x[3] * f[2] - g / (x[1] * x[1]) * f[1]};
                           }});
  s.push_back(flat_graph(C::CalK2, "Q2'", 3, 2));
  s.push_back(plane(C::TildeK1, "sigma1=0", 2));
  s.push_back(plane(C::TildeK1, "eps1=0", 1));
  s.push_back(line(C::TildeK1, "x1=eps1=0", 0, 1));
  s.push_back(plane(C::TildeK2, "sigma2=0", 2));
  s.push_back(plane(C::TildeK2, "r2=0", 1));
  s.push_back(line(C::HatK31, "rhat1-axis", 1, 2));
  s.push_back(line(C::HatK31, "sigma-axis (H)", 0, 2));
  s.push_back(line(C::HatK31, "shat1-axis", 0, 1));
  s.push_back(line(C::K12, "G+", 0, 2, {std::sqrt(2.0 * a), 0.0}));
  s.push_back(line(C::K12, "G-", 0, 2, {-std::sqrt(2.0 * a), 0.0}));
  s.push_back(plane(C::K12, "s2=0", 2));
  s.push_back(line(C::K11, "G+11", 0, 2, {1.0 / (2.0 * a), 0.0}));
  s.push_back(line(C::K11, "H11", 0, 2));
  s.push_back(plane(C::K21, "r21=0", 1));
  s.push_back(plane(C::K21, "s1=0", 2));
  s.push_back(line(C::K21, "H21", 1, 2));
  s.push_back(line(C::K31, "H31", 0, 2));
  return s;
}

Vec pushforward(const CorbeillerParams& prm, const TransitionImpl& t, const Vec& p, double h0) {
  const Vec f = field(prm, t.spec.from, p);
  const std::size_t n = p.size();
  Vec out(chart_arity(t.spec.to), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = h0 * std::max(1.0, std::abs(p[j]));
    Vec xp = p, xm = p;
    xp[j] += h;
    xm[j] -= h;
    const Vec mp = t.map(xp), mm = t.map(xm);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (mp[i] - mm[i]) / (2.0 * h) * f[j];
  }
  return out;
}

bool has_resonance(const std::vector<Complex>& e, double tol) {
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j)
      for (std::size_t k = j + 1; k < e.size(); ++k)
        if (i != j && i != k && std::abs(e[i] - e[j] - e[k]) <= tol) return true;
  return false;
}

// Chart-level distance between two points, through any shared ancestor or a
// transition between ancestors; nullopt when none applies.
std::optional<double> chart_distance(const ChartPoint& p, const ChartPoint& q) {
  std::vector<ChartPoint> ap{p}, aq{q};
  while (auto u = parent_point(ap.back())) ap.push_back(*u);
  while (auto u = parent_point(aq.back())) aq.push_back(*u);
  auto dist = [](const Vec& u, const Vec& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    return d;
  };
  for (const auto& x : ap)
    for (const auto& y : aq) {
      if (x.chart == y.chart) return dist(x.c, y.c);
      if (in_overlap(x.chart, y.chart, x.c)) return dist(chart_transition(x.chart, y.chart, x).c, y.c);
    }
  return std::nullopt;
}

}  // namespace

std::vector<CheckResult> run_chart_suite(const CorbeillerParams& prm, const SuiteOptions& opt) {
  std::vector<CheckResult> out;
  Sampler sm(opt.seed);

  auto sample_overlap = [&](const TransitionImpl& t, bool interior) {
    for (int tries = 0; tries < 100000; ++tries) {
      Vec v = sm.chart_point(t.spec.from);
      if (!t.overlap(v)) continue;
      const Vec w = t.map(v);
      if (!std::all_of(w.begin(), w.end(), fin)) continue;
      if (interior && norm(field(prm, t.spec.from, v)) == 0.0) continue;
      return v;
    }
    throw Error(Errc::DomainError, "could not sample the overlap of " + t.spec.label);
  };

  for (const auto& t : transition_table()) {
    const std::string pair = std::string(chart_name(t.spec.from)) + "->" + chart_name(t.spec.to);
    const TransitionImpl* back = find_transition(t.spec.to, t.spec.from);
    Worst rt, bd, col;
    for (int i = 0; i < opt.n_points; ++i) {
      const Vec p = sample_overlap(t, true);
      const Vec q = t.map(p);
      if (back) {
        const Vec pr = back->map(q);
        double e = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) e = std::max(e, std::abs(pr[k] - p[k]) / std::max(1.0, std::abs(p[k])));
        rt.see(e, p);
      }
      const Original o1 = blow_down({t.spec.from, p}), o2 = blow_down({t.spec.to, q});
      bd.see(std::max({rel_diff(o1.x, o2.x), rel_diff(o1.y, o2.y), rel_diff(o1.eps, o2.eps)}), p);
      col.see(angle(pushforward(prm, t, p, opt.fd_step), field(prm, t.spec.to, q)), p);
    }
    out.push_back(make("roundtrip", t.spec.label + " " + pair, chart_name(t.spec.from), rt, opt.roundtrip_tol));
    out.push_back(make("commutation", t.spec.label + " " + pair, chart_name(t.spec.from), bd, opt.commutation_tol));
    out.push_back(make("collinearity", t.spec.label + " " + pair, chart_name(t.spec.from), col, opt.angle_tol));
  }

  for (const auto& r : equilibria_catalog(prm)) {
    Worst w;
    w.see(r.max_mismatch, r.point);
    out.push_back(make("eigen", r.label, chart_name(r.chart), w, opt.eig_tol));
    Worst wd;
    wd.see(r.max_mismatch_derived, r.point);
    out.push_back(make("eigen_field", r.label, chart_name(r.chart), wd, opt.eig_tol));
    if (r.chart == ChartId::K12) {
      Worst res;
      res.see(has_resonance(r.numeric_eigs, opt.eig_tol) ? 0.0 : 1.0, r.point);
      out.push_back(make("resonance", r.label + " lambda1=lambda2+lambda3", chart_name(r.chart), res, 0.0));
    }
  }

  for (const auto& s : invariant_sets(prm)) {
    Worst w;
    for (int i = 0; i < opt.n_invariant_points; ++i) {
      const Vec p = s.point(sm);
      const Vec nrm = s.normal(p, field(prm, s.chart, p));
      double m = 0.0;
      for (double v : nrm) m = std::max(m, std::abs(v));
      w.see(m, p);
    }
    out.push_back(make("invariant", s.name, chart_name(s.chart), w, opt.invariant_tol));
  }

  {
    const double a = prm.a;
    for (double sgn : {1.0, -1.0}) {
      Worst w;
      for (int i = 0; i < opt.n_invariant_points; ++i) {
        const Vec p{sgn * std::sqrt(2.0 * a), sm.uni(0.05, 2.0), 0.0};
        const ChartPoint q = chart_transition(ChartId::K12, ChartId::K22, {ChartId::K12, p});
        w.see(std::abs(q.c[1] + q.c[0] * q.c[0] / (2.0 * a)), p);
      }
      out.push_back(make("parabola", sgn > 0 ? "G+ in K22" : "G- in K22", "K12", w, opt.parabola_tol));
    }
    Worst w;
    for (int i = 0; i < opt.n_invariant_points; ++i) {
      const Vec p{1.0 / (2.0 * a), sm.uni(0.05, 2.0), 0.0};
      const ChartPoint q = chart_transition(ChartId::K11, ChartId::K22, {ChartId::K11, p});
      w.see(std::abs(q.c[1] + q.c[0] * q.c[0] / (2.0 * a)), p);
    }
    out.push_back(make("parabola", "G+11 in K22", "K11", w, opt.parabola_tol));
  }

  {
    Worst w;
    for (double d : {0.12, 0.24, 0.36, 0.48})
      for (double r : {0.02, 0.15, 0.3, 0.45}) {
        const Pi14 an = pi14_transition(d, r), nu = pi14_numeric(d, r);
        w.see(std::abs(an.T - nu.T), {d, r});
      }
    out.push_back(make("pi14", "closed-form T vs integration", "FrakK1", w, 1e-8));
  }

  {
    const auto segs = blown_up_singular_segments(prm);
    Worst wb, wc;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      const ChartPoint p{segs[i].chart, segs[i].points.back()}, q{segs[i + 1].chart, segs[i + 1].points.front()};
      const Original o1 = blow_down(p), o2 = blow_down(q);
      wb.see(std::max({std::abs(o1.x - o2.x), std::abs(o1.y - o2.y), std::abs(o1.eps - o2.eps)}), p.c);
      if (auto d = chart_distance(p, q)) wc.see(*d, p.c);
    }
    out.push_back(make("segments", "endpoint blow-down agreement", "", wb, 1e-6));
    out.push_back(make("segments", "endpoint agreement in a shared chart", "", wc, 1e-6));
  }
  return out;
}

}  // namespace exosc
