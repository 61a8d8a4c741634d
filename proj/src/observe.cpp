#include "dampwave/observe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dampwave/csv.hpp"

namespace dampwave {

namespace {

// Linear interpolation of a trace channel; tiny overshoots from accumulated
// step times are absorbed.
double channel_at(const EnergyTrace& trace, const std::vector<double>& channel, double t) {
  const auto& ts = trace.times;
  if (ts.empty()) throw std::invalid_argument("trace is empty");
  const double slack = 1e-9 * std::max(1.0, std::abs(ts.back()));
  if (t < ts.front() - slack || t > ts.back() + slack) {
    throw std::out_of_range("time " + format_double(t) + " outside the simulated range [" +
                            format_double(ts.front()) + ", " + format_double(ts.back()) + "]");
  }
  if (t <= ts.front()) return channel.front();
  if (t >= ts.back()) return channel.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return (1.0 - w) * channel[lo] + w * channel[hi];
}

WaveState advance(const WaveState& s, const std::optional<DampingProfile>& W, double t, const SolverConfig& config) {
  if (t <= s.t) return s;
  SolverConfig c = config;
  c.trace_stride = std::numeric_limits<int>::max();
  return evolve(s, W, t, c).state;
}

double observe_window(const WaveState& at_t0, const std::optional<DampingProfile>& damping,
                      const ObservationWindow& window, const SolverConfig& config) {
  SolverConfig c = config;
  c.trace_stride = std::numeric_limits<int>::max();
  const auto r = evolve(at_t0, damping, window.t1(), c, window.W);
  return r.trace.cum_obs.back();
}

// sum (-1)^(n+1) (2x)^(2n+1) / (4 (2n+1)!) = x/2 - sin(2x)/4
double sin2_primitive_series(double x) {
  const double y = 2.0 * x;
  double term = y * y * y / 6.0;
  double acc = 0.0;
  for (int n = 1; n < 30; ++n) {
    acc += term;
    term *= -y * y / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc / 4.0;
}

}  // namespace

void ObservationWindow::validate() const {
  if (!(t0 >= 0.0) || !std::isfinite(t0)) throw std::invalid_argument("observation window needs t0 >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("observation window needs T > 0");
}

double observed_quantity(const EnergyTrace& trace, const ObservationWindow& window) {
  window.validate();
  if (trace.cum_obs.size() != trace.size()) throw std::invalid_argument("trace has no observation channel");
  const double q = channel_at(trace, trace.cum_obs, window.t1()) - channel_at(trace, trace.cum_obs, window.t0);
  return std::max(q, 0.0);
}

double observed_quantity(const WaveState& initial, const std::optional<DampingProfile>& damping,
                         const ObservationWindow& window, const SolverConfig& config) {
  window.validate();
  if (window.t0 < initial.t) throw std::out_of_range("observation window starts before the initial data");
  return observe_window(advance(initial, damping, window.t0, config), damping, window, config);
}

ObservabilityReport observability_ratio(const WaveState& initial, const ObservationWindow& window,
                                        const SolverConfig& config) {
  ObservabilityReport r;
  r.energy = energy(initial.u, initial.v);
  r.observed = observed_quantity(initial, std::nullopt, window, config);
  r.observable = r.observed > 0.0;
  r.ratio = r.observable ? r.energy / r.observed : std::numeric_limits<double>::infinity();
  return r;
}

SandwichReport sandwich_check(const WaveState& initial, const ObservationWindow& window, const SolverConfig& config,
                              double tolerance) {
  window.validate();
  if (window.t0 < initial.t) throw std::out_of_range("observation window starts before the initial data");
  const WaveState start = advance(initial, window.W, window.t0, config);
  SandwichReport r;
  r.lhs = observe_window(start, window.W, window, config);
  r.mid = observe_window(start, std::nullopt, window, config);
  r.C_T = 1.0 + 2.0 * window.T * window.W.sup_norm();
  r.rhs = r.C_T * r.C_T * r.lhs;
  r.lower_slack = r.mid - r.lhs;
  r.upper_slack = r.rhs - r.mid;
  r.pass = r.lower_slack >= -tolerance && r.upper_slack >= -tolerance;
  return r;
}

double trig_window_integral(double A, double B, double lambda, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("short-time window needs delta > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("short-time mode needs lambda > 0");
  const double x = lambda * delta;
  const double sin2 = x < 0.5 ? sin2_primitive_series(x) : x / 2.0 - std::sin(2.0 * x) / 4.0;
  const double cos2 = x - sin2;
  const double sincos = std::sin(x) * std::sin(x) / 2.0;
  return (A * A * sin2 + B * B * cos2 - 2.0 * A * B * sincos) / lambda;
}

ShortTimeSweep short_time_sweep(double A, double B, double lambda, const std::vector<double>& deltas) {
  if (A == 0.0 && B == 0.0) throw std::invalid_argument("short-time mode is zero");
  ShortTimeSweep s{A, B, lambda, {}, 0.0};
  const double e = 0.5 * lambda * lambda * (A * A + B * B);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double d : deltas) {
    const double obs = lambda * lambda * trig_window_integral(A, B, lambda, d);
    s.rows.push_back({d, e, obs, e * d * d * d / obs, e / obs});
    const double x = std::log(d), y = std::log(e / obs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(deltas.size());
  if (deltas.size() >= 2) s.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return s;
}

void ShortTimeSweep::write_csv(std::ostream& out) const {
  write_csv_header(out, {"A", "B", "lambda", "delta", "energy", "observed", "C", "ratio", "slope"});
  for (const auto& r : rows) write_csv_row(out, {A, B, lambda, r.delta, r.energy, r.observed, r.constant, r.ratio, slope});
}

DecayBookkeeping decay_bookkeeping(const std::vector<double>& b, double T0) {
  if (!(T0 > 0.0)) throw std::invalid_argument("decay bookkeeping needs T0 > 0");
  DecayBookkeeping d{T0, b, {1.0}, false};
  double B = 0.0;
  for (double bj : b) {
    if (!(bj >= 0.0)) throw std::invalid_argument("window fractions must be nonnegative");
    if (bj >= 1.0) d.flagged = true;
    B += bj;
    d.bound.push_back(d.flagged ? 0.0 : std::exp(-B));
  }
  return d;
}

DecayCheck decay_check(const EnergyTrace& trace, double T0, double tolerance) {
  trace.validate();
  if (!(T0 > 0.0)) throw std::invalid_argument("decay check needs T0 > 0");
  const double t_start = trace.times.front(), t_end = trace.times.back();
  const auto windows = static_cast<std::size_t>(std::floor((t_end - t_start) / T0 + 1e-9));
  std::vector<double> b, e{channel_at(trace, trace.energy, t_start)};
  for (std::size_t j = 0; j < windows; ++j) {
    const double a = t_start + static_cast<double>(j) * T0, c = a + T0;
    const double obs = channel_at(trace, trace.cum_obs, c) - channel_at(trace, trace.cum_obs, a);
    b.push_back(e.back() > 0.0 ? std::max(obs, 0.0) / e.back() : 0.0);
    e.push_back(channel_at(trace, trace.energy, c));
  }
  DecayCheck d{decay_bookkeeping(b, T0), {}, true};
  for (std::size_t k = 0; k < e.size(); ++k) {
    d.energy_ratio.push_back(e[k] / e.front());
    if (d.energy_ratio[k] > d.bookkeeping.bound[k] + tolerance) d.holds = false;
  }
  return d;
}

}  // namespace dampwave
