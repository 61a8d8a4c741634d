#pragma once

#include <numbers>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/grid.hpp"
#include "json.hpp"

namespace dampwave {

/// Unit-speed straight line on the flat torus, gamma(s) = x0 + (s - s_ref) * direction.
struct Geodesic {
  Point x0{0.0, 0.0};
  Point direction{1.0, 0.0};
  /// Parameter value at which the geodesic passes through x0.
  double s_ref = 0.0;
  int dim = 1;
  double period = 2.0 * std::numbers::pi;

  static Geodesic on_circle(double x0, int sign, double s_ref = 0.0,
                            double period = 2.0 * std::numbers::pi);
  static Geodesic on_torus(Point x0, double angle, double s_ref = 0.0,
                           double period = 2.0 * std::numbers::pi);

  /// Position at parameter s, reduced to [0, period)^dim.
  Point at(double s) const;
  /// The same line re-anchored so that gamma(s_ref') is its current position.
  Geodesic anchored_at(double s) const;
  double angle() const;
};

nlohmann::json to_json(const Geodesic& g);

struct GeodesicSampling {
  int n_points = 32;        // base points per axis
  int n_directions = 16;    // uniform directions on the circle (T² only)
  int n_start_times = 33;   // t0 samples on [0, t0_max]
  double t0_max = 0.0;
  double quadrature_step = 0.01;
  bool refine = true;       // one golden-section pass around the grid minimizer

  void validate() const;
};

nlohmann::json to_json(const GeodesicSampling& s);

/// The geodesics a sampling scans on the given torus: a lattice of base points
/// times the sampled directions. T² directions always include the axes and
/// diagonals.
std::vector<Geodesic> sample_geodesics(const GeodesicSampling& sampling, int dim,
                                       double period = 2.0 * std::numbers::pi);

/// Integral of W(gamma(s), s) over [t0, t1] by composite midpoint, split at the
/// profile's discontinuity times.
double line_integral(const DampingProfile& W, const Geodesic& gamma, double t0, double t1,
                     double max_step = 0.01);

/// exp(-line_integral(W, gamma, t0, t)).
double propagator_G(const DampingProfile& W, const Geodesic& gamma, double t0, double t,
                    double max_step = 0.01);

struct SigmaReport {
  double t = 0.0;
  double value = 0.0;
  Geodesic witness;
  std::size_t geodesics_scanned = 0;
  bool refined = false;
};

nlohmann::json to_json(const SigmaReport& r);

/// Sigma(t): smallest damping accumulated along a sampled geodesic on [0, t].
SigmaReport sigma(const DampingProfile& W, double t, const GeodesicSampling& sampling, int dim);

/// Sigma at each of the increasing `times`, from one scan over the sampled
/// geodesics (no refinement), so the curve is nondecreasing by construction.
std::vector<double> sigma_curve(const DampingProfile& W, const std::vector<double>& times,
                                const GeodesicSampling& sampling, int dim);

struct WindowAverageReport {
  double T = 0.0;
  double value = 0.0;  // min over (gamma, t0) of the window average
  Geodesic witness;
  double witness_t0 = 0.0;
};

nlohmann::json to_json(const WindowAverageReport& r);

/// L(T): smallest average of W over windows [t0, t0 + T] along sampled geodesics.
WindowAverageReport L_of_T(const DampingProfile& W, double T, const GeodesicSampling& sampling,
                           int dim);

struct LInfinityReport {
  double value = 0.0;
  std::vector<WindowAverageReport> ladder;
};

/// max over T in {T_max / 2^m, m = 0..rungs-1} of L(T).
LInfinityReport L_infinity(const DampingProfile& W, const GeodesicSampling& sampling, double T_max,
                           int dim, int rungs = 6);

struct TgccReport {
  double T0 = 0.0;
  double min_average = 0.0;
  Geodesic witness;
  double witness_t0 = 0.0;
  double witness_T = 0.0;
  bool satisfied = false;
  double tolerance = 0.0;
  std::vector<WindowAverageReport> curve;  // L(T) on the ladder T0 * 2^m
  GeodesicSampling sampling;
};

nlohmann::json to_json(const TgccReport& r);

/// Time-dependent geometric control check over windows T in {T0 * 2^m}.
TgccReport check_tgcc(const DampingProfile& W, double T0, const GeodesicSampling& sampling, int dim,
                      int rungs = 4, double tolerance = 1e-9);

}  // namespace dampwave
