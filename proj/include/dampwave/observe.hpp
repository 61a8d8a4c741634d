#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/solver.hpp"

namespace dampwave {

struct ObservationWindow {
  double t0 = 0.0;
  double T = 1.0;
  DampingProfile W;

  void validate() const;
  double t1() const { return t0 + T; }
};

// Reads the cum_obs channel of a trace recorded with window.W as observation
// weight (or as damping, when no separate weight was given). Samples are
// linearly interpolated; throws if the window leaves the recorded range.
double observed_quantity(const EnergyTrace& trace, const ObservationWindow& window);

// Evolves `initial` (damped by `damping`, or free when none) to the window
// and integrates W |v|^2 across it.
double observed_quantity(const WaveState& initial, const std::optional<DampingProfile>& damping,
                         const ObservationWindow& window, const SolverConfig& config);

struct ObservabilityReport {
  double energy = 0.0;
  double observed = 0.0;
  double ratio = 0.0;  // +inf when unobservable
  bool observable = false;
};

// E(psi, t0) / observed for the free evolution of `initial`.
ObservabilityReport observability_ratio(const WaveState& initial, const ObservationWindow& window,
                                        const SolverConfig& config);

struct SandwichReport {
  double lhs = 0.0;  // damped
  double mid = 0.0;  // free
  double rhs = 0.0;  // C_T^2 * lhs
  double C_T = 1.0;
  double lower_slack = 0.0;
  double upper_slack = 0.0;
  bool pass = false;
};

// The damped run u starts from `initial`; the free run psi starts from u at
// window.t0. Both are observed through window.W, which also damps u.
SandwichReport sandwich_check(const WaveState& initial, const ObservationWindow& window,
                              const SolverConfig& config, double tolerance = 1e-8);

struct ShortTimeRow {
  double delta = 0.0;
  double energy = 0.0;
  double observed = 0.0;
  double constant = 0.0;  // energy * delta^3 / observed
  double ratio = 0.0;     // energy / observed
};

struct ShortTimeSweep {
  double A = 1.0;
  double B = 0.0;
  double lambda = 1.0;
  std::vector<ShortTimeRow> rows;
  double slope = 0.0;  // least squares of log ratio against log delta

  void write_csv(std::ostream& out) const;
};

// psi = phi(x) (A cos(lambda t) + B sin(lambda t)) with ||phi|| = 1, evaluated
// in closed form.
ShortTimeSweep short_time_sweep(double A, double B, double lambda, const std::vector<double>& deltas);

// int_0^delta |-A sin(lambda t) + B cos(lambda t)|^2 dt, series-evaluated when
// lambda * delta is small.
double trig_window_integral(double A, double B, double lambda, double delta);

struct DecayBookkeeping {
  double T0 = 0.0;
  std::vector<double> b;
  std::vector<double> bound;  // exp(-B(k)), k = 0..b.size()
  bool flagged = false;       // some b >= 1; bound is 0 from there on
};

DecayBookkeeping decay_bookkeeping(const std::vector<double>& b, double T0);

struct DecayCheck {
  DecayBookkeeping bookkeeping;
  std::vector<double> energy_ratio;  // E(kT0) / E(0)
  bool holds = false;
};

// b(jT0) = observed over [jT0, (j+1)T0] / E(jT0), read from a trace whose
// cum_obs channel is the damping's own.
DecayCheck decay_check(const EnergyTrace& trace, double T0, double tolerance = 1e-12);

}  // namespace dampwave
