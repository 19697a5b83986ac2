#pragma once

#include <string>
#include <vector>

#include "exosc/models.hpp"

namespace exosc {

using Polyline = std::vector<State2>;

struct JumpPoint {
  double x_j, y_j;
};

// Fold of the critical manifold. ConditionViolated unless kappa(1+alpha) in (0,1).
JumpPoint hester_jump_point(const HesterParams& p);

enum class Branch { Attracting, Fold, Repelling };
const char* branch_name(Branch b);

struct CriticalManifoldSample {
  double y2, x;
  Branch branch;
};

CriticalManifoldSample critical_manifold_hester(const HesterParams& p, double y2);

// Closed form for the damped linear focus: half a turn shrinks by e^{-gamma pi/sqrt(1-gamma^2)}.
double drop_point_hester(const HesterParams& p);
// Same drop point by integrating the lower field from (x_j, 0) to the next y = 0.
double drop_point_hester_integrated(const HesterParams& p, double rtol = 1e-11);
// First return of the lower field from the tangency (0,0) to y = 0.
double drop_point_corbeiller(const CorbeillerParams& p, double rtol = 1e-11);

struct Segment {
  std::string label;
  Polyline points;
};

struct SingularCycle {
  SystemParams params;
  std::vector<Segment> segments;
};

SingularCycle singular_cycle(const SystemParams& p);

double polyline_length(const Polyline& pl);
// n >= 2 points equally spaced in arclength, endpoints kept.
Polyline resample_count(const Polyline& pl, std::size_t n);
// Points at most `step` apart in arclength, endpoints kept.
Polyline resample_step(const Polyline& pl, double step);

// Symmetric Hausdorff distance between the sampled point sets. EmptyInput
// when either side has no points.
double hausdorff_distance(const std::vector<Polyline>& A, const std::vector<Polyline>& B, double resample_step);

}  // namespace exosc
