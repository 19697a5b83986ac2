#include "exosc/slowmf.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace exosc {

double slow_manifold_hester(const HesterParams& p, double x) {
  const double k = p.kappa * (1.0 + p.alpha);
  const double yj = -std::log(k) / p.alpha;
  auto xc = [&](double h) { return p.mu * (std::exp(h) - p.kappa * std::exp((1.0 + p.alpha) * h)); };
  const double xj = xc(yj);
  if (!(x < xj)) throw Error(Errc::OutOfDomain, "x must lie below the jump-off abscissa");
  // xc is decreasing on [y_j, inf).
  double lo = yj, hi = yj + 60.0;
  if (xc(hi) > x) throw Error(Errc::OutOfDomain, "x is beyond the bracketing range");
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (xc(mid) > x)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(xc(lo) - x) < std::abs(xc(hi) - x) ? lo : hi;
}

double slow_manifold_corbeiller(const CorbeillerParams& p, double eps, double x, ManifoldOrder order) {
  if (!(eps > 0.0)) throw Error(Errc::DomainError, "eps must be positive");
  if (!(x < 0.0)) throw Error(Errc::OutOfDomain, "the slow manifold graph needs x < 0");
  const double lead = eps * lambert_w(-x / (eps * p.b));
  if (order == ManifoldOrder::Leading) return lead;
  return lead * (1.0 - eps * p.b * 2.0 / x);
}

void write_manifold_csv(std::ostream& os, const std::vector<ManifoldSample>& samples) {
  os << std::setprecision(17) << "x,y_graph,order\n";
  for (const auto& s : samples)
    os << s.x << ',' << s.y_graph << ',' << (s.order == ManifoldOrder::Leading ? "leading" : "full") << '\n';
}

double manifold_residual(const SystemParams& p, double eps, const Trajectory& traj, XWindow window,
                         ManifoldOrder order, bool relative) {
  std::vector<double> res;
  if (p.system == System::Hester) {
    const HesterParams hp = p.as_hester();
    for (const auto& s : traj.states) {
      if (s.x < window.lo || s.x > window.hi || !(s.y > 0.0)) continue;
      res.push_back(std::abs(s.y / eps - slow_manifold_hester(hp, s.x)));
    }
  } else {
    const CorbeillerParams cp = p.as_corbeiller();
    for (const auto& s : traj.states) {
      if (s.x < window.lo || s.x > window.hi || !(s.y > 0.0) || !(s.x < 0.0)) continue;
      const double g = slow_manifold_corbeiller(cp, eps, s.x, order);
      const double r = std::abs(s.y - g);
      res.push_back(relative ? r / std::abs(g) : r);
    }
  }
  if (res.empty()) throw Error(Errc::EmptyWindow, "no trajectory sample on the upper side of the window");

  std::vector<double> sorted = res;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double cut = 3.0 * *mid;
  std::size_t start = 0;
  while (start < res.size() && res[start] > cut) ++start;
  return *std::max_element(res.begin() + static_cast<std::ptrdiff_t>(start), res.end());
}

}  // namespace exosc
