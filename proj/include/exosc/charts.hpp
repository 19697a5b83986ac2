#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "exosc/models.hpp"

namespace exosc {

// Blow-up charts of the Le Corbeiller system. CalK2Q is CalK2 restricted to
// the invariant set nu2 = e^{-1/eps}; the spherical charts blow it up.
enum class ChartId {
  K1,
  K2,
  K3,
  ExtK3,
  FrakK1,
  CalK1,
  CalK2,
  CalK2Q,
  TildeK1,
  TildeK2,
  HatK31,
  HatK32,
  K11,
  K12,
  K21,
  K22,
  K31,
  K32,
};

const std::vector<ChartId>& all_charts();
const char* chart_name(ChartId c);
ChartId parse_chart(const std::string& s);
std::size_t chart_arity(ChartId c);
// Coordinate names in storage order.
const std::vector<std::string>& chart_coords(ChartId c);

struct ChartPoint {
  ChartId chart;
  std::vector<double> c;
};

// e^{-1/u} for u > 0 and its flat extension 0 for u <= 0.
double flat_exp(double u);

// InvalidChartPoint for wrong arity, non-finite or negative radii.
void check_chart_point(const ChartPoint& p);

std::vector<double> eval_chart_field(const CorbeillerParams& prm, const ChartPoint& p);
// Same without the domain check; used for finite differences at boundaries.
std::vector<double> eval_chart_field_unchecked(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x);

struct TransitionSpec {
  ChartId from, to;
  // Paper label, or "derived" for maps composed from the blow-up definitions.
  std::string label;
};
// Every implemented map. Each pair appears in both directions.
const std::vector<TransitionSpec>& transitions();
bool in_overlap(ChartId from, ChartId to, const std::vector<double>& x);
// OutsideOverlap when the point misses the strict overlap conditions.
ChartPoint chart_transition(ChartId from, ChartId to, const ChartPoint& p);

// One step up the blow-up hierarchy; nullopt for K1, K2, K3 (their parent is
// the original (x, y, eps)).
std::optional<ChartPoint> parent_point(const ChartPoint& p);
// Follows parent_point until `ancestor` is reached. DomainError if it is not on the chain.
ChartPoint express_in(const ChartPoint& p, ChartId ancestor);

struct Original {
  double x, y, eps;
};
Original blow_down(const ChartPoint& p);

using Complex = std::complex<double>;

struct EquilibriumRecord {
  ChartId chart;
  std::string label;
  std::vector<double> point;
  std::vector<Complex> lemma_eigs;    // as stated in the lemma
  std::vector<Complex> derived_eigs;  // from linearizing the transcribed field
  std::string classification;
  std::vector<Complex> numeric_eigs;
  double max_mismatch = 0.0;          // numeric vs lemma
  double max_mismatch_derived = 0.0;  // numeric vs derived
};

std::vector<Complex> sorted_eigs(std::vector<Complex> v);
// Finite-difference Jacobian (central, step h) at x.
std::vector<std::vector<double>> chart_jacobian(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x,
                                                double h = 1e-7);
std::vector<Complex> numeric_spectrum(const CorbeillerParams& prm, ChartId c, const std::vector<double>& x);
// Max distance between sorted spectra; infinity on length mismatch.
double spectrum_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b);

// Records for all lemmas stating eigenvalues; numeric fields filled in.
std::vector<EquilibriumRecord> equilibria_catalog(const CorbeillerParams& prm);
std::vector<EquilibriumRecord> equilibria_catalog(ChartId chart, const CorbeillerParams& prm);

struct ChartConstants {
  double delta = 0.1;
  double eta = 0.1;
  double beta = 0.05;
};

struct ChartSegment {
  std::string label;
  ChartId chart;
  std::vector<std::vector<double>> points;
};

// Gamma2..Gamma8 as chart polylines. x_d is the drop point of the lower field.
std::vector<ChartSegment> blown_up_singular_segments(const CorbeillerParams& prm, double x_d);
std::vector<ChartSegment> blown_up_singular_segments(const CorbeillerParams& prm);

// Slope dx1/deps1 of the centre manifold at p_l from the null vector of the Jacobian.
double center_manifold_slope(const CorbeillerParams& prm);

struct Pi14 {
  double T, eps_out, rho_out;
};
// Closed form: T = -1/delta + W(1/(r_in delta)). DomainError outside 0<delta<1, r_in>0.
Pi14 pi14_transition(double delta, double r_in);
// The same data from integrating r' = r(1+eps), eps' = -eps^2, rho' = -rho
// until r = e^{-1/delta} (backward when r_in is already above it).
Pi14 pi14_numeric(double delta, double r_in, double rtol = 1e-12);

struct CheckResult {
  std::string category;  // roundtrip, commutation, collinearity, eigen, invariant, parabola, pi14, segments
  std::string name;
  std::string chart;
  std::vector<double> point;
  double mismatch = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  int n_points = 100;
  int n_invariant_points = 50;
  double roundtrip_tol = 1e-12;
  double commutation_tol = 1e-12;
  double angle_tol = 1e-6;
  double fd_step = 1e-7;
  double eig_tol = 1e-6;
  double invariant_tol = 1e-12;
  double parabola_tol = 1e-10;
};

// Full invariant suite; one result per check (random checks are aggregated to
// their worst point).
std::vector<CheckResult> run_chart_suite(const CorbeillerParams& prm, const SuiteOptions& opt = {});

void write_segments_csv(std::ostream& os, const std::vector<ChartSegment>& segs);

}  // namespace exosc
