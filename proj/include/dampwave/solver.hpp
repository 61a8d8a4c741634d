#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/errors.hpp"
#include "dampwave/grid.hpp"

namespace dampwave {

struct WaveState {
  Field u;
  Field v;
  double t = 0.0;

  WaveState(Field u, Field v, double t = 0.0);
  const TorusGrid& grid() const { return u.grid(); }
};

enum class Scheme { rk4, strang };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme s);

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::rk4;
  bool align_to_discontinuities = true;
  int trace_stride = 1;

  void validate() const;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> sigma;  // empty unless filled by the caller
  /// Running integral of the damping's  W |v|^2 over [t_start, t].
  std::vector<double> damping_work;
  /// Running integral of the observation weight's W |v|^2 (defaults to the damping).
  std::vector<double> cum_obs;

  std::size_t size() const { return times.size(); }
  void validate() const;
  /// Columns t, energy, sigma, cum_obs; sigma is left blank when absent.
  void write_csv(std::ostream& out) const;
};

struct EvolveResult {
  WaveState state;
  EnergyTrace trace;
};

/// Integrates u_t = v, v_t = lap u - 2 W v from state.t to t_end. With no
/// damping this is the free wave equation. `observation` only feeds the
/// cum_obs channel.
EvolveResult evolve(const WaveState& state, const std::optional<DampingProfile>& W, double t_end,
                    const SolverConfig& config,
                    const std::optional<DampingProfile>& observation = std::nullopt);

/// max_t |E(t) - E(0) + 2 * damping_work(t)|.
double energy_identity_check(const EnergyTrace& trace);

/// Largest stable rk4 step for a grid.
double rk4_step_limit(const TorusGrid& grid);

}  // namespace dampwave
