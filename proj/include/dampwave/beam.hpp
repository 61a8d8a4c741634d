#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dampwave/damping.hpp"
#include "dampwave/geodesic.hpp"
#include "dampwave/grid.hpp"
#include "dampwave/solver.hpp"

namespace dampwave {

// A Gaussian beam riding the geodesic gamma, which sits at gamma.at(t) at time t.
struct BeamSpec {
  Geodesic gamma;
  double k = 32.0;
  Eigen::MatrixXcd M0;  // complex symmetric, Im M0 positive definite
  // Amplitude at t0. When unset, chosen so that the beam carries unit energy
  // to leading order: pi^(-n/4) det(Im M0)^(1/4).
  std::optional<Complex> b0_init;
  double t0 = 0.0;

  // M0 = i I.
  static BeamSpec along(const Geodesic& gamma, double k, double t0 = 0.0);

  void validate() const;
  Complex initial_amplitude() const;
  int dim() const { return gamma.dim; }
};

struct BeamFrame {
  double t = 0.0;
  Eigen::MatrixXcd M;
  Complex b0;
  Point position;
  Point direction;
};

// Integrates M' = -M^2 + M p p^T M and b0' = -b0 tr(M (I - p p^T)) / 2 with
// rk4 at step <= 1e-3 from spec.t0 to t.
BeamFrame propagate_frame(const BeamSpec& spec, double t);

struct BeamSample {
  Field u;   // position
  Field v;   // time derivative
  Field a;   // second time derivative
};

// k^(-1 + n/4) b0 e^{i k psi} and its exact time derivatives, periodized.
BeamSample beam_field(const BeamSpec& spec, const TorusGrid& grid, double t);

// The beam multiplied by G(gamma, t0, t); W = none reduces to beam_field.
BeamSample quasi_solution(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                          double t);

// || (d_t^2 - lap + 2 W d_t) v ||_{L^2} at time t.
double residual_norm(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                     double t);

struct BeamVsExactReport {
  std::vector<double> times;
  std::vector<double> energy_exact;
  std::vector<double> g_squared;
  double sup_defect = 0.0;
  double initial_energy = 0.0;
  // E(t) > E(t0) (G^2 - 2 eps) with eps = sup_defect at every sample.
  bool lower_bound_holds = false;

  void write_csv(std::ostream& out) const;
};

// Evolves the exact solution launched from the quasi-solution at t0 and
// compares its energy with G^2 along the beam's geodesic.
BeamVsExactReport beam_vs_exact(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                                 double t_end, SolverConfig config);

}  // namespace dampwave
