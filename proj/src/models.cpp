#include "exosc/models.hpp"

#include <cmath>
#include <sstream>

namespace exosc {

namespace {

constexpr double kExpGuard = 700.0;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// sigma = 1/(1+e^u) and 1-sigma both come from softplus so neither overflows.
FieldValue hester_norm(double alpha, double mu, double kappa, double gamma, double eps, State2 s) {
  const double u = (1.0 + alpha) * s.y / eps;
  const double sp = softplus(u);
  const double sig = std::exp(-sp);
  const double lin = -s.x - 2.0 * gamma * s.y;
  return {s.y * sig, lin * sig + mu * std::exp(s.y / eps - sp) - kappa * mu * std::exp(-softplus(-u))};
}

FieldValue corbeiller_norm(double a, double b, double eps, State2 s) {
  const double u = s.y / eps;
  const double sig = std::exp(-softplus(u));
  return {(s.y + a) * sig, (-s.x + 2.0 * b * s.y) * sig - b * s.y * std::exp(-softplus(-u))};
}

}  // namespace

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::OverflowGuard: return "OverflowGuard";
    case Errc::OnSwitchingManifold: return "OnSwitchingManifold";
    case Errc::ConditionViolated: return "ConditionViolated";
    case Errc::DomainError: return "DomainError";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::MaxStepsExceeded: return "MaxStepsExceeded";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::IntegrationFailure: return "IntegrationFailure";
    case Errc::NoReturn: return "NoReturn";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::InvalidChartPoint: return "InvalidChartPoint";
    case Errc::OutsideOverlap: return "OutsideOverlap";
  }
  return "Unknown";
}

const char* system_name(System s) { return s == System::Hester ? "hester" : "corbeiller"; }

System parse_system(const std::string& name) {
  if (name == "hester") return System::Hester;
  if (name == "corbeiller") return System::Corbeiller;
  throw Error(Errc::InvalidParams, "unknown system '" + name + "' (expected hester or corbeiller)");
}

HesterParams::HesterParams(double alpha_, double mu_, double kappa_, double gamma_)
    : alpha(alpha_), mu(mu_), kappa(kappa_), gamma(gamma_) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(Errc::InvalidParams, "alpha must be positive, got " + fmt(alpha));
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw Error(Errc::InvalidParams, "mu must be positive, got " + fmt(mu));
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw Error(Errc::InvalidParams, "kappa must be positive, got " + fmt(kappa));
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error(Errc::InvalidParams,
                "gamma must lie in (0,1) so the origin of the lower field is a stable focus, got " +
                    fmt(gamma));
}

bool HesterParams::cycle_condition() const {
  const double k = kappa * (1.0 + alpha);
  return k > 0.0 && k < 1.0;
}

CorbeillerParams::CorbeillerParams(double a_, double b_) : a(a_), b(b_) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(Errc::InvalidParams, "a must be positive, got " + fmt(a));
  if (!(b > 0.0 && b < 1.0)) throw Error(Errc::InvalidParams, "b must lie in (0,1), got " + fmt(b));
}

Epsilon::Epsilon(double value) : v_(value), pws_(false) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(Errc::DomainError, "eps must be positive, got " + fmt(value));
}

Epsilon Epsilon::pws() { return Epsilon(); }

double Epsilon::value() const {
  if (pws_) throw Error(Errc::DomainError, "the eps -> 0 sentinel has no smooth field");
  return v_;
}

double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

double logistic_neg(double u) { return std::exp(-softplus(u)); }

FieldValue hester_field_normalized(const HesterParams& p, const Epsilon& eps, State2 s) {
  return hester_norm(p.alpha, p.mu, p.kappa, p.gamma, eps.value(), s);
}

FieldValue corbeiller_field_normalized(const CorbeillerParams& p, const Epsilon& eps, State2 s) {
  return corbeiller_norm(p.a, p.b, eps.value(), s);
}

FieldValue hester_field_raw(const HesterParams& p, const Epsilon& eps, State2 s) {
  const double e = eps.value();
  const double u = (1.0 + p.alpha) * s.y / e;
  if (std::abs(u) > kExpGuard)
    throw Error(Errc::OverflowGuard, "exponent " + fmt(u) + " exceeds 700; use the normalized field");
  return {s.y, -s.x - 2.0 * p.gamma * s.y + p.mu * std::exp(s.y / e) - p.kappa * p.mu * std::exp(u)};
}

FieldValue corbeiller_field_raw(const CorbeillerParams& p, const Epsilon& eps, State2 s) {
  const double u = s.y / eps.value();
  if (std::abs(u) > kExpGuard)
    throw Error(Errc::OverflowGuard, "exponent " + fmt(u) + " exceeds 700; use the normalized field");
  return {s.y + p.a, -s.x + p.b * s.y * (2.0 - std::exp(u))};
}

double hester_time_factor(const HesterParams& p, double eps, double y) {
  return logistic_neg((1.0 + p.alpha) * y / eps);
}

double corbeiller_time_factor(double eps, double y) { return logistic_neg(y / eps); }

FieldValue hester_pws_field(const HesterParams& p, State2 s) {
  if (s.y == 0.0) throw Error(Errc::OnSwitchingManifold, "y = 0, the limit field is degenerate there");
  if (s.y > 0.0) return {0.0, -p.kappa * p.mu};
  return {s.y, -s.x - 2.0 * p.gamma * s.y};
}

FieldValue corbeiller_pws_field(const CorbeillerParams& p, State2 s) {
  if (s.y == 0.0) throw Error(Errc::OnSwitchingManifold, "y = 0, the limit field is degenerate there");
  if (s.y > 0.0) return {0.0, -p.b * s.y};
  return {s.y + p.a, -s.x + 2.0 * p.b * s.y};
}

State2 hester_equilibrium(const HesterParams& p) { return {p.mu * (1.0 - p.kappa), 0.0}; }

State2 corbeiller_equilibrium(const CorbeillerParams& p, const Epsilon& eps) {
  const double tail = eps.is_pws() ? 0.0 : std::exp(-p.a / eps.value());
  return {-p.a * p.b * (2.0 - tail), -p.a};
}

SystemParams SystemParams::hester(const HesterParams& p) {
  SystemParams sp{System::Hester};
  sp.alpha = p.alpha;
  sp.mu = p.mu;
  sp.kappa = p.kappa;
  sp.gamma = p.gamma;
  return sp;
}

SystemParams SystemParams::corbeiller(const CorbeillerParams& p) {
  SystemParams sp{System::Corbeiller};
  sp.a = p.a;
  sp.b = p.b;
  return sp;
}

HesterParams SystemParams::as_hester() const { return HesterParams(alpha, mu, kappa, gamma); }
CorbeillerParams SystemParams::as_corbeiller() const { return CorbeillerParams(a, b); }

void SystemParams::validate() const {
  if (system == System::Hester)
    (void)as_hester();
  else
    (void)as_corbeiller();
}

FieldValue field_normalized(const SystemParams& p, double eps, State2 s) {
  if (p.system == System::Hester) return hester_norm(p.alpha, p.mu, p.kappa, p.gamma, eps, s);
  return corbeiller_norm(p.a, p.b, eps, s);
}

FieldValue field_raw(const SystemParams& p, double eps, State2 s) {
  if (p.system == System::Hester) return hester_field_raw(p.as_hester(), Epsilon(eps), s);
  return corbeiller_field_raw(p.as_corbeiller(), Epsilon(eps), s);
}

FieldValue pws_field(const SystemParams& p, State2 s) {
  if (p.system == System::Hester) return hester_pws_field(p.as_hester(), s);
  return corbeiller_pws_field(p.as_corbeiller(), s);
}

State2 equilibrium(const SystemParams& p, const Epsilon& eps) {
  if (p.system == System::Hester) return hester_equilibrium(p.as_hester());
  return corbeiller_equilibrium(p.as_corbeiller(), eps);
}

double time_factor(const SystemParams& p, double eps, double y) {
  const double u = p.system == System::Hester ? (1.0 + p.alpha) * y / eps : y / eps;
  return logistic_neg(u);
}

}  // namespace exosc
