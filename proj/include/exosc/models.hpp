#pragma once

#include <string>

#include "exosc/error.hpp"

namespace exosc {

enum class System { Hester, Corbeiller };

const char* system_name(System s);
System parse_system(const std::string& name);

struct HesterParams {
  double alpha, mu, kappa, gamma;

  // Throws InvalidParams unless alpha, mu, kappa > 0 and 0 < gamma < 1.
  HesterParams(double alpha, double mu, double kappa, double gamma);

  // kappa*(1+alpha) in (0,1): the regime with a relaxation cycle.
  bool cycle_condition() const;
};

struct CorbeillerParams {
  double a, b;

  // Throws InvalidParams unless a > 0 and 0 < b < 1.
  CorbeillerParams(double a, double b);
};

// Positive perturbation parameter, or the eps -> 0 sentinel that only the
// piecewise-smooth operations accept.
class Epsilon {
 public:
  explicit Epsilon(double value);
  static Epsilon pws();

  bool is_pws() const { return pws_; }
  // Throws DomainError on the sentinel.
  double value() const;

 private:
  Epsilon() = default;
  double v_ = 0.0;
  bool pws_ = true;
};

struct State2 {
  double x = 0.0, y = 0.0;
};

struct FieldValue {
  double dx = 0.0, dy = 0.0;
};

// log(1 + e^u) without overflow.
double softplus(double u);
// 1/(1+e^u) = exp(-softplus(u)).
double logistic_neg(double u);

FieldValue hester_field_normalized(const HesterParams& p, const Epsilon& eps, State2 s);
FieldValue corbeiller_field_normalized(const CorbeillerParams& p, const Epsilon& eps, State2 s);

// Literal right-hand sides. Throw OverflowGuard once an exponent passes 700.
FieldValue hester_field_raw(const HesterParams& p, const Epsilon& eps, State2 s);
FieldValue corbeiller_field_raw(const CorbeillerParams& p, const Epsilon& eps, State2 s);

// Positive factor f with normalized = f * raw.
double hester_time_factor(const HesterParams& p, double eps, double y);
double corbeiller_time_factor(double eps, double y);

FieldValue hester_pws_field(const HesterParams& p, State2 s);
FieldValue corbeiller_pws_field(const CorbeillerParams& p, State2 s);

State2 hester_equilibrium(const HesterParams& p);
State2 corbeiller_equilibrium(const CorbeillerParams& p, const Epsilon& eps);

// Either parameter set, tagged.
struct SystemParams {
  System system;
  double alpha = 0.5, mu = 0.4, kappa = 0.2, gamma = 0.3;
  double a = 1.0, b = 0.25;

  static SystemParams hester(const HesterParams& p);
  static SystemParams corbeiller(const CorbeillerParams& p);

  HesterParams as_hester() const;
  CorbeillerParams as_corbeiller() const;
  // Runs the constructor checks of the tagged system.
  void validate() const;
};

FieldValue field_normalized(const SystemParams& p, double eps, State2 s);
FieldValue field_raw(const SystemParams& p, double eps, State2 s);
FieldValue pws_field(const SystemParams& p, State2 s);
State2 equilibrium(const SystemParams& p, const Epsilon& eps);
// dt/dt1 = 1/(1+e^{(1+alpha)y/eps}) or 1/(1+e^{y/eps}).
double time_factor(const SystemParams& p, double eps, double y);

}  // namespace exosc
