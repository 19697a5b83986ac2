#include <cmath>
#include <limits>

#include "exosc/slowmf.hpp"

namespace exosc {

namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr double kE = 2.71828182845904523536028747135266;
constexpr int kMaxIter = 50;

// Start near the branch point from the expansion in p = sqrt(2(e w + 1)).
double branch_start(double w) {
  const double p = std::sqrt(2.0 * (kE * w + 1.0));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

double series_start(double w) {
  return w * (1.0 + w * (-1.0 + w * (1.5 + w * (-8.0 / 3.0 + w * (125.0 / 24.0)))));
}

// [2/2] Pade of W at the origin, good to a few percent up to e.
double pade_start(double w) {
  return w * (1.0 + 4.0 / 3.0 * w) / (1.0 + w * (7.0 / 3.0 + 5.0 / 6.0 * w));
}

// Halley on w e^w - z.
double halley_direct(double z, double w) {
  double best = w, best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kMaxIter; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best = w;
    }
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
  }
  const double f_last = std::abs(w * std::exp(w) - z);
  return f_last <= best_f ? w : best;
}

// Halley on w + ln w - L, the log form of w e^w = e^L; avoids overflow for
// large arguments.
double halley_log(double L) {
  const double l2 = std::log(L);
  double w = L - l2 + l2 / L;
  for (int i = 0; i < kMaxIter; ++i) {
    const double g = w + std::log(w) - L;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2);
    w -= step;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * w) break;
  }
  return w;
}

}  // namespace

double lambert_w(double w) {
  if (std::isnan(w) || w <= -kInvE) throw Error(Errc::DomainError, "W is undefined for w <= -1/e");
  if (w == 0.0) return 0.0;
  if (std::isinf(w)) return w;
  if (w > kE) return halley_log(std::log(w));
  double start;
  if (w < -0.3)
    start = branch_start(w);
  else if (w < 0.3)
    start = series_start(w);
  else
    start = pade_start(w);
  return halley_direct(w, start);
}

double z_function(double s) {
  if (std::isnan(s) || s < 0.0) throw Error(Errc::DomainError, "Z is defined for s >= 0 only");
  if (s == 0.0) return 0.0;
  // 1/s > e: use the log form directly so tiny s never overflows 1/s.
  if (s < kInvE) return 1.0 / halley_log(-std::log(s));
  return 1.0 / lambert_w(1.0 / s);
}

}  // namespace exosc
