#include "dampwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dampwave/csv.hpp"

namespace dampwave {

WaveState::WaveState(Field u_, Field v_, double t_) : u(std::move(u_)), v(std::move(v_)), t(t_) {
  if (!(u.grid() == v.grid())) throw std::invalid_argument("WaveState: u and v live on different grids");
  if (u.kind() != FieldKind::position || v.kind() != FieldKind::velocity) {
    throw std::invalid_argument("WaveState: expected (position, velocity) fields");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("WaveState: t must be >= 0");
}

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::rk4;
  if (name == "strang") return Scheme::strang;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected rk4 or strang)");
}

const char* to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "strang"; }

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SolverConfig: dt must be > 0");
  if (trace_stride < 1) throw std::invalid_argument("SolverConfig: trace_stride must be >= 1");
}

double rk4_step_limit(const TorusGrid& grid) { return 2.8 / grid.max_wavenumber(); }

void EnergyTrace::validate() const {
  const auto n = times.size();
  if (energy.size() != n || (!sigma.empty() && sigma.size() != n) ||
      (!damping_work.empty() && damping_work.size() != n) || (!cum_obs.empty() && cum_obs.size() != n)) {
    throw std::invalid_argument("EnergyTrace: channel lengths differ");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("EnergyTrace: times not increasing");
  }
  for (double e : energy) {
    if (!(e >= 0.0)) throw std::invalid_argument("EnergyTrace: negative energy");
  }
}

void EnergyTrace::write_csv(std::ostream& out) const {
  write_csv_header(out, {"t", "energy", "sigma", "cum_obs"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_double(times[i]) << ',' << format_double(energy[i]) << ',';
    if (!sigma.empty()) out << format_double(sigma[i]);
    out << ',' << (cum_obs.empty() ? "" : format_double(cum_obs[i])) << '\n';
  }
}

namespace {

// W(., t) on the grid nodes. Separable profiles are sampled in space once.
class DampingSampler {
 public:
  DampingSampler(const std::optional<DampingProfile>& W, const TorusGrid& grid)
      : W_(W), grid_(grid), buffer_(grid.size(), 0.0) {
    if (!W_) return;
    if (W_->separable()) {
      spatial_.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) spatial_[i] = W_->spatial(grid.node(i));
    }
  }

  bool active() const { return W_.has_value(); }

  const std::vector<double>& at(double t) {
    if (!W_) return buffer_;
    if (!spatial_.empty()) {
      const double s = W_->temporal(t);
      for (std::size_t i = 0; i < buffer_.size(); ++i) buffer_[i] = spatial_[i] * s;
    } else {
      for (std::size_t i = 0; i < buffer_.size(); ++i) buffer_[i] = W_->eval(grid_.node(i), t);
    }
    return buffer_;
  }

  // Three-point Gauss-Legendre integral of W(x, .) over [a, b] per node.
  void integral(double a, double b, std::vector<double>& out) {
    out.assign(grid_.size(), 0.0);
    if (!W_ || b <= a) return;
    static constexpr double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 3; ++q) {
      const auto& w = at(mid + half * nodes[q]);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += half * weights[q] * w[i];
    }
  }

 private:
  std::optional<DampingProfile> W_;
  TorusGrid grid_;
  std::vector<double> spatial_;
  std::vector<double> buffer_;
};

class Integrator {
 public:
  Integrator(const TorusGrid& grid, const std::optional<DampingProfile>& W,
             const std::optional<DampingProfile>& obs, bool obs_is_damping)
      : grid_(grid),
        spectral_(Spectral::for_grid(grid)),
        damping_(W, grid),
        observation_(obs, grid),
        obs_is_damping_(obs_is_damping),
        n_(grid.size()) {}

  double damping_work = 0.0;
  double cum_obs = 0.0;

  // One step over [t, t + h]; W is sampled at most up to `limit` so a step
  // ending on a switch time sees the left limit there.
  void rk4(std::vector<Complex>& u, std::vector<Complex>& v, double t, double h, double limit) {
    const double eps = 1e-9 * std::max(1.0, std::abs(limit));
    auto clamp = [&](double s) { return std::min(s, limit - eps); };
    ut_ = u;
    vt_ = v;
    au_.assign(n_, Complex{});
    av_.assign(n_, Complex{});
    double ac = 0.0, ao = 0.0;
    static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
    static constexpr double b[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
    ku_.resize(n_);
    kv_.resize(n_);
    for (int s = 0; s < 4; ++s) {
      if (s > 0) {
        for (std::size_t i = 0; i < n_; ++i) {
          ut_[i] = u[i] + (c[s] * h) * ku_[i];
          vt_[i] = v[i] + (c[s] * h) * kv_[i];
        }
      }
      const double ts = clamp(t + c[s] * h);
      spectral_->laplacian(ut_, kv_);
      const auto& w = damping_.at(ts);
      double kc = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        ku_[i] = vt_[i];
        kv_[i] -= 2.0 * w[i] * vt_[i];
        kc += w[i] * std::norm(vt_[i]);
      }
      double ko = kc;
      if (!obs_is_damping_) {
        const auto& wo = observation_.at(ts);
        ko = 0.0;
        for (std::size_t i = 0; i < n_; ++i) ko += wo[i] * std::norm(vt_[i]);
      }
      for (std::size_t i = 0; i < n_; ++i) {
        au_[i] += b[s] * ku_[i];
        av_[i] += b[s] * kv_[i];
      }
      ac += b[s] * kc;
      ao += b[s] * ko;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      u[i] += h * au_[i];
      v[i] += h * av_[i];
    }
    damping_work += h * ac * grid_.cell_volume();
    cum_obs += h * ao * grid_.cell_volume();
  }

  // Half damping, exact free rotation, half damping.
  void strang(std::vector<Complex>& u, std::vector<Complex>& v, double t, double h) {
    damp(v, t, t + 0.5 * h);
    rotate(u, v, h);
    damp(v, t + 0.5 * h, t + h);
  }

 private:
  // v_t = -2 W v solved exactly per node; the work integral is exact too.
  void damp(std::vector<Complex>& v, double a, double b) {
    damping_.integral(a, b, I_);
    if (!obs_is_damping_) observation_.integral(a, b, Io_);
    double dw = 0.0, dobs = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v2 = std::norm(v[i]);
      const double I = I_[i];
      // integral of |v|^2 over the substep divided by the one at its start
      const double absorbed = I > 1e-12 ? -std::expm1(-4.0 * I) / 4.0 : I * (1.0 - 2.0 * I);
      dw += v2 * absorbed;
      if (!obs_is_damping_) dobs += v2 * Io_[i] * (I > 1e-12 ? absorbed / I : 1.0 - 2.0 * I);
      if (I > 0.0) v[i] *= std::exp(-2.0 * I);
    }
    damping_work += dw * grid_.cell_volume();
    cum_obs += (obs_is_damping_ ? dw : dobs) * grid_.cell_volume();
  }

  void rotate(std::vector<Complex>& u, std::vector<Complex>& v, double h) {
    ku_.resize(n_);
    kv_.resize(n_);
    spectral_->forward(u, ku_);
    spectral_->forward(v, kv_);
    const auto k2 = spectral_->wavenumber_squared();
    for (std::size_t i = 0; i < n_; ++i) {
      const double w = std::sqrt(k2[i]);
      const Complex a = ku_[i], b = kv_[i];
      if (w == 0.0) {
        ku_[i] = a + h * b;
      } else {
        const double c = std::cos(w * h), s = std::sin(w * h);
        ku_[i] = c * a + (s / w) * b;
        kv_[i] = -w * s * a + c * b;
      }
    }
    spectral_->backward(ku_, u);
    spectral_->backward(kv_, v);
  }

  TorusGrid grid_;
  std::shared_ptr<const Spectral> spectral_;
  DampingSampler damping_;
  DampingSampler observation_;
  bool obs_is_damping_;
  std::size_t n_;
  std::vector<Complex> ut_, vt_, au_, av_, ku_, kv_;
  std::vector<double> I_, Io_;
};

}  // namespace

EvolveResult evolve(const WaveState& state, const std::optional<DampingProfile>& W, double t_end,
                    const SolverConfig& config, const std::optional<DampingProfile>& observation) {
  config.validate();
  const double t_start = state.t;
  if (!(t_end >= t_start)) throw std::invalid_argument("evolve: t_end precedes the state's time");
  const auto& grid = state.grid();
  if (config.scheme == Scheme::rk4 && config.dt > rk4_step_limit(grid)) {
    throw std::invalid_argument("evolve: dt " + format_double(config.dt) + " exceeds the rk4 limit " +
                                format_double(rk4_step_limit(grid)) + " for this grid");
  }

  const bool obs_is_damping = !observation.has_value();
  Integrator integrator(grid, W, obs_is_damping ? W : observation, obs_is_damping);

  std::vector<Complex> u(state.u.values().begin(), state.u.values().end());
  std::vector<Complex> v(state.v.values().begin(), state.v.values().end());

  EnergyTrace trace;
  const double e0 = energy(grid, u, v);
  auto record = [&](double t) {
    trace.times.push_back(t);
    trace.energy.push_back(energy(grid, u, v));
    trace.damping_work.push_back(integrator.damping_work);
    trace.cum_obs.push_back(integrator.cum_obs);
  };
  record(t_start);

  std::vector<double> breaks{t_start};
  if (config.align_to_discontinuities && W) {
    for (double s : discontinuity_times(*W, t_end)) {
      if (s > t_start) breaks.push_back(s);
    }
  }
  if (t_end > breaks.back()) breaks.push_back(t_end);

  const double growth_tol = 1e-6 * e0 + 1e-14;
  long step = 0;
  for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
    const double a = breaks[seg], b = breaks[seg + 1];
    if (b - a <= 1e-14 * std::max(1.0, b)) continue;
    const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / config.dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      const double t = a + static_cast<double>(i) * h;
      if (config.scheme == Scheme::rk4) {
        integrator.rk4(u, v, t, h, b);
      } else {
        integrator.strang(u, v, t, h);
      }
      ++step;
      const bool last = seg + 2 == breaks.size() && i + 1 == n;
      if (step % config.trace_stride == 0 || last) {
        record(i + 1 == n ? b : a + static_cast<double>(i + 1) * h);
        const double e = trace.energy.back();
        if (!std::isfinite(e) || e > e0 + growth_tol) {
          throw NumericalFailure("evolve: energy grew from " + format_double(e0) + " to " + format_double(e) +
                                 " at t = " + format_double(trace.times.back()) +
                                 " (step unstable or data under-resolved)");
        }
      }
    }
  }

  WaveState out(Field(grid, FieldKind::position, std::move(u)), Field(grid, FieldKind::velocity, std::move(v)),
                std::max(t_end, t_start));
  return {std::move(out), std::move(trace)};
}

double energy_identity_check(const EnergyTrace& trace) {
  if (trace.damping_work.size() != trace.size() || trace.size() == 0) {
    throw std::invalid_argument("energy_identity_check: trace has no dissipation channel");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double d = trace.energy[i] - trace.energy[0] + 2.0 * (trace.damping_work[i] - trace.damping_work[0]);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

}  // namespace dampwave
