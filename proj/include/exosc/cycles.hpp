#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "exosc/models.hpp"
#include "exosc/ode.hpp"
#include "exosc/singular.hpp"

namespace exosc {

enum class Crossing { Descending, Ascending };

struct SectionSpec {
  double delta = 0.1;
  Crossing crossing = Crossing::Descending;
};

struct CycleOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  // Rescaled-time budget for one return is budget_scale / eps (at least 200).
  double budget_scale = 2000.0;
  long max_steps = 20'000'000;
  double floquet_step = 1e-3;
  double floquet_floor = 1e-12;
  double secant_tol = 1e-11;
  int max_secant = 60;
  // Arclength spacing of the stored cycle polyline.
  double polyline_step = 1e-3;
};

IntegratorConfig cycle_integrator(double eps, const CycleOptions& opt);

// Integrates the normalized field with t = original time carried as a third
// state (dt/dt1 = time_factor) until t reaches t_end. Stored times and event
// times are original time; events report crossings of y = 0.
Trajectory simulate_original_time(const SystemParams& p, double eps, State2 s0, double t_end,
                                  const IntegratorConfig& cfg);

// Next crossing of y = -delta in the section direction, starting from (x, -delta).
// NoReturn if none within the budget.
double return_map(const SystemParams& p, double eps, const SectionSpec& sec, double x,
                  const CycleOptions& opt = {});

struct LimitCycle {
  SystemParams params;
  double eps = 0.0;
  double delta = 0.1;
  Polyline points;
  double period = 0.0;           // rescaled time t1
  double period_original = 0.0;  // original time t
  double fixed_point_x = 0.0;
  double fixed_point_residual = 0.0;
  double floquet = 0.0;
  bool floquet_floor_flag = false;
  // Integral of the divergence over one period: log|Pi'| without finite differences.
  double log_floquet_divergence = 0.0;
  int iterations = 0;
};

// Point on the section reached after `returns` crossings starting from the
// singular cycle's jump point.
double transient_seed(const SystemParams& p, double eps, const SectionSpec& sec, int returns = 3,
                      const CycleOptions& opt = {});

// Damped secant on Pi(x) - x. Without `seed` the start comes from transient_seed.
LimitCycle find_cycle(const SystemParams& p, double eps, const SectionSpec& sec,
                      std::optional<double> seed = std::nullopt, const CycleOptions& opt = {});

enum class Existence { CycleFound, ConvergesToEquilibrium, Indeterminate };
const char* existence_name(Existence e);

struct ExistenceOptions {
  double ball_radius = 5.0;
  int n_seeds = 20;
  std::uint64_t seed = 42;
  double t_equilibrium = 500.0;
  double equilibrium_tol = 1e-4;
  double cycle_tol = 1e-3;
  int max_returns = 6;
  SectionSpec section{};
};

struct ExistenceResult {
  Existence kind = Existence::Indeterminate;
  std::optional<LimitCycle> cycle;
  std::string note;
};

ExistenceResult classify_existence(const SystemParams& p, double eps, const ExistenceOptions& opt = {},
                                   const CycleOptions& copt = {});

struct ConvergenceRow {
  double eps = 0.0;
  bool ok = false;
  std::string error;
  double hausdorff = 0.0;
  double period = 0.0;
  double period_original = 0.0;
  double log_floquet = 0.0;
  bool floor_flag = false;
  double log_floquet_divergence = 0.0;
  double fixed_point_x = 0.0;
};

struct ConvergenceReport {
  SystemParams params;
  std::vector<ConvergenceRow> rows;
};

// Rows are computed concurrently (up to `threads`, 0 = hardware) and kept in eps order.
ConvergenceReport convergence_study(const SystemParams& p, const std::vector<double>& eps_list,
                                    const SectionSpec& sec, double resample_step = 1e-3, unsigned threads = 0,
                                    const CycleOptions& opt = {});

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r);

// Least-squares slope of ys against xs.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace exosc
