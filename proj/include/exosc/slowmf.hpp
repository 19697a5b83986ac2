#pragma once

#include <ostream>
#include <vector>

#include "exosc/models.hpp"
#include "exosc/ode.hpp"

namespace exosc {

// Principal branch of w -> w e^w. DomainError for w < -1/e.
double lambert_w(double w);

// Z(s) = 1/W(1/s), Z(0) = 0; solves s = Z e^{-1/Z}.
double z_function(double s);

// Leading-order scaled ordinate h(x) of the attracting slow manifold
// y = eps*h: the root h > y_j of x = mu(e^h - kappa e^{(1+alpha)h}).
// OutOfDomain for x >= x_j.
double slow_manifold_hester(const HesterParams& p, double x);

enum class ManifoldOrder { Leading, Full };

// y = eps W(-x/(eps b)), optionally times the first correction
// (1 - eps b x^{-1} h) with h = 2. OutOfDomain for x >= 0.
double slow_manifold_corbeiller(const CorbeillerParams& p, double eps, double x, ManifoldOrder order);

struct ManifoldSample {
  double x, y_graph;
  ManifoldOrder order;
};

void write_manifold_csv(std::ostream& os, const std::vector<ManifoldSample>& samples);

struct XWindow {
  double lo, hi;
};

// Max over trajectory samples with x in the window and y > 0 of
// |y/eps - h(x)| (Hester) or |y - y_graph(x)| (Le Corbeiller), after
// discarding the transient prefix. With relative = true the Le Corbeiller
// residual is divided by |y_graph|. EmptyWindow if no sample qualifies.
double manifold_residual(const SystemParams& p, double eps, const Trajectory& traj, XWindow window,
                         ManifoldOrder order = ManifoldOrder::Leading, bool relative = false);

}  // namespace exosc
