#pragma once

// Independent reference computations for the tests. None of these call the
// library routines they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// Root of z e^z = w on the principal branch by bisection in long double.
inline double lambert_w_bisect(double w) {
  long double lo = -1.0L, hi = std::max(1.0L, std::log(std::max(1.0L, (long double)w)) + 1.0L);
  for (int i = 0; i < 400; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid * std::exp(mid) < w)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// Golden-section maximizer on [lo, hi] in long double; returns the argmax.
// Near a quadratic maximum the argmax is only good to sqrt(unit roundoff).
inline double golden_max(const std::function<long double(long double)>& f, double lo, double hi, double tol = 1e-12) {
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo, b = hi, c = b - g * (b - a), d = a + g * (b - a);
  while (b - a > tol) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return static_cast<double>(0.5L * (a + b));
}

using V2 = std::array<double, 2>;

// Classical fixed-step RK4 until y crosses zero upward (after leaving y = 0),
// then the crossing is refined by bisection on the step size from the last
// state. Returns x at the crossing.
inline double rk4_first_upward_crossing(const std::function<V2(V2)>& f, V2 s, double h, double t_max) {
  auto step = [&](V2 y, double dt) {
    auto add = [](V2 a, V2 b, double k) { return V2{a[0] + k * b[0], a[1] + k * b[1]}; };
    const V2 k1 = f(y), k2 = f(add(y, k1, dt / 2)), k3 = f(add(y, k2, dt / 2)), k4 = f(add(y, k3, dt));
    return V2{y[0] + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
              y[1] + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  };
  bool left = false;
  for (double t = 0.0; t < t_max; t += h) {
    const V2 n = step(s, h);
    if (n[1] < -1e-9) left = true;
    if (left && s[1] < 0.0 && n[1] >= 0.0) {
      double lo = 0.0, hi = h;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (step(s, mid)[1] < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return step(s, 0.5 * (lo + hi))[0];
    }
    s = n;
  }
  return NAN;
}

// Brute-force symmetric Hausdorff distance between finite point sets.
inline double hausdorff_points(const std::vector<V2>& A, const std::vector<V2>& B) {
  auto dir = [](const std::vector<V2>& P, const std::vector<V2>& Q) {
    double m = 0.0;
    for (const auto& p : P) {
      double best = INFINITY;
      for (const auto& q : Q) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
      m = std::max(m, best);
    }
    return m;
  };
  return std::max(dir(A, B), dir(B, A));
}

// Fourth-order central-difference Jacobian of a map R^n -> R^m.
inline std::vector<std::vector<double>> jacobian5(const std::function<std::vector<double>(const std::vector<double>&)>& F,
                                                  const std::vector<double>& x, double h = 1e-4) {
  const std::size_t n = x.size();
  const std::size_t m = F(x).size();
  std::vector<std::vector<double>> J(m, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    auto at = [&](double k) {
      auto y = x;
      y[j] += k * h;
      return F(y);
    };
    const auto f2 = at(2), f1 = at(1), fm1 = at(-1), fm2 = at(-2);
    for (std::size_t i = 0; i < m; ++i) J[i][j] = (-f2[i] + 8 * f1[i] - 8 * fm1[i] + fm2[i]) / (12 * h);
  }
  return J;
}

inline std::vector<double> matvec(const std::vector<std::vector<double>>& J, const std::vector<double>& v) {
  std::vector<double> out(J.size(), 0.0);
  for (std::size_t i = 0; i < J.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += J[i][j] * v[j];
  return out;
}

// Angle between two vectors; pi if either is zero.
inline double angle(const std::vector<double>& u, const std::vector<double>& v) {
  double nu = 0, nv = 0, dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    nu += u[i] * u[i];
    nv += v[i] * v[i];
    dot += u[i] * v[i];
  }
  if (nu == 0 || nv == 0) return M_PI;
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = u[i] / std::sqrt(nu) - v[i] / std::sqrt(nv);
    d += e * e;
  }
  return 2.0 * std::asin(std::min(1.0, std::sqrt(d) / 2.0));
}

// Hand-rolled generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

}  // namespace oracle
