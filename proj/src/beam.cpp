#include "dampwave/beam.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dampwave/csv.hpp"

namespace dampwave {

namespace {

using Mat = Eigen::MatrixXcd;
constexpr Complex I{0.0, 1.0};
// exp(-36.84) ~ 1e-16: images whose Gaussian weight falls below it are dropped.
constexpr double kWeightCutoff = 36.84;

Eigen::VectorXcd direction_vector(const Geodesic& g) {
  Eigen::VectorXcd p(g.dim);
  for (int i = 0; i < g.dim; ++i) p(i) = g.direction[i];
  return p;
}

void require_positive_imaginary(const Mat& M, const char* where) {
  Eigen::MatrixXd im = M.imag();
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (im + im.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure(std::string(where) + ": Im M is not positive definite");
  }
}

Mat riccati(const Mat& M, const Mat& ppT) { return -M * M + M * ppT * M; }

struct FrameDerivatives {
  Mat Md, Mdd;
  Complex bd, bdd;
};

FrameDerivatives derivatives(const BeamFrame& f, const Eigen::VectorXcd& p) {
  const Mat ppT = p * p.transpose();
  const Mat P = Mat::Identity(p.size(), p.size()) - ppT;
  FrameDerivatives d;
  d.Md = riccati(f.M, ppT);
  d.Mdd = -d.Md * f.M - f.M * d.Md + d.Md * ppT * f.M + f.M * ppT * d.Md;
  const Complex trMP = (f.M * P).trace();
  const Complex trMdP = (d.Md * P).trace();
  d.bd = -0.5 * f.b0 * trMP;
  d.bdd = -0.5 * (d.bd * trMP + f.b0 * trMdP);
  return d;
}

// W(gamma(t), t) and its derivative along the ray.
std::pair<double, double> ray_damping(const DampingProfile& W, const Geodesic& g, double t) {
  auto w = [&](double s) { return W.eval(g.at(s), s); };
  const double h = 1e-5;
  const double value = w(t);
  const double slope = t >= h ? (w(t + h) - w(t - h)) / (2 * h) : (w(t + h) - value) / h;
  return {value, slope};
}

}  // namespace

BeamSpec BeamSpec::along(const Geodesic& gamma, double k, double t0) {
  BeamSpec s;
  s.gamma = gamma;
  s.k = k;
  s.t0 = t0;
  s.M0 = I * Mat::Identity(gamma.dim, gamma.dim);
  return s;
}

void BeamSpec::validate() const {
  if (!(k >= 1.0)) throw std::invalid_argument("BeamSpec: k must be >= 1");
  if (!(t0 >= 0.0)) throw std::invalid_argument("BeamSpec: t0 must be >= 0");
  if (M0.rows() != gamma.dim || M0.cols() != gamma.dim) {
    throw std::invalid_argument("BeamSpec: M0 must be dim x dim");
  }
  if ((M0 - M0.transpose()).norm() > 1e-12 * (1.0 + M0.norm())) {
    throw std::invalid_argument("BeamSpec: M0 must be symmetric");
  }
  Eigen::MatrixXd im = M0.imag();
  Eigen::LLT<Eigen::MatrixXd> llt(im);
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(im).eigenvalues();
  if (llt.info() != Eigen::Success || eig.minCoeff() <= 0.0) {
    throw std::invalid_argument("BeamSpec: Im M0 must be positive definite");
  }
}

Complex BeamSpec::initial_amplitude() const {
  if (b0_init) return *b0_init;
  const double det = Eigen::MatrixXd(M0.imag()).determinant();
  return std::pow(std::numbers::pi, -0.25 * gamma.dim) * std::pow(det, 0.25);
}

BeamFrame propagate_frame(const BeamSpec& spec, double t) {
  spec.validate();
  if (t < spec.t0) throw std::invalid_argument("propagate_frame: t precedes t0");
  const auto p = direction_vector(spec.gamma);
  const Mat ppT = p * p.transpose();
  const Mat P = Mat::Identity(p.size(), p.size()) - ppT;

  Mat M = spec.M0;
  Complex b = spec.initial_amplitude();
  const long n = std::max(1L, static_cast<long>(std::ceil((t - spec.t0) / 1e-3 - 1e-9)));
  const double h = (t - spec.t0) / static_cast<double>(n);
  auto bdot = [&](const Mat& m, Complex b0) { return -0.5 * b0 * (m * P).trace(); };
  if (h > 0.0) {
    for (long i = 0; i < n; ++i) {
      const Mat k1 = riccati(M, ppT);
      const Complex c1 = bdot(M, b);
      const Mat M2 = M + 0.5 * h * k1;
      const Complex b2 = b + 0.5 * h * c1;
      const Mat k2 = riccati(M2, ppT);
      const Complex c2 = bdot(M2, b2);
      const Mat M3 = M + 0.5 * h * k2;
      const Complex b3 = b + 0.5 * h * c2;
      const Mat k3 = riccati(M3, ppT);
      const Complex c3 = bdot(M3, b3);
      const Mat M4 = M + h * k3;
      const Complex b4 = b + h * c3;
      const Mat k4 = riccati(M4, ppT);
      const Complex c4 = bdot(M4, b4);
      M += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      M = 0.5 * (M + M.transpose()).eval();
      b += (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
      require_positive_imaginary(M, "propagate_frame");
    }
  }
  BeamFrame f;
  f.t = t;
  f.M = M;
  f.b0 = b;
  f.position = spec.gamma.at(t);
  f.direction = spec.gamma.direction;
  return f;
}

BeamSample quasi_solution(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                          double t) {
  spec.validate();
  if (grid.dim() != spec.dim()) throw std::invalid_argument("beam: grid and geodesic dimensions differ");
  if (grid.points_per_axis() < 4.0 * spec.k) {
    throw std::invalid_argument("beam: grid under-resolves k (need >= 4k points per axis)");
  }
  if (std::abs(grid.period() - spec.gamma.period) > 1e-12) {
    throw std::invalid_argument("beam: geodesic and grid periods differ");
  }
  const int d = grid.dim();
  const double k = spec.k;
  const double L = grid.period();
  const auto frame = propagate_frame(spec, t);
  const auto pv = direction_vector(spec.gamma);
  const auto dv = derivatives(frame, pv);

  double G = 1.0, w = 0.0, wdot = 0.0;
  if (W) {
    G = propagator_G(*W, spec.gamma, spec.t0, t);
    std::tie(w, wdot) = ray_damping(*W, spec.gamma, t);
  }
  // A = c b0 G and its time derivatives, with G' = -w G.
  const double c = std::pow(k, -1.0 + 0.25 * d);
  const double Gd = -w * G, Gdd = (w * w - wdot) * G;
  const Complex A = c * frame.b0 * G;
  const Complex Ad = c * (dv.bd * G + frame.b0 * Gd);
  const Complex Add = c * (dv.bdd * G + 2.0 * dv.bd * Gd + frame.b0 * Gdd);

  Complex M[2][2]{}, Md[2][2]{}, Mdd[2][2]{};
  double p[2]{};
  for (int i = 0; i < d; ++i) {
    p[i] = spec.gamma.direction[i];
    for (int j = 0; j < d; ++j) {
      M[i][j] = frame.M(i, j);
      Md[i][j] = dv.Md(i, j);
      Mdd[i][j] = dv.Mdd(i, j);
    }
  }
  Complex pMp = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) pMp += p[i] * M[i][j] * p[j];

  const double lam_min =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(frame.M.imag())).eigenvalues().minCoeff();
  const double radius = std::sqrt(2.0 * kWeightCutoff / (k * lam_min));
  const int reach = static_cast<int>(std::floor((radius + 0.5 * L) / L));
  const int reach1 = d == 2 ? reach : 0;

  const std::size_t n = grid.size();
  std::vector<Complex> u(n), v(n), a(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Point x = grid.node(idx);
    double base[2]{};
    for (int i = 0; i < d; ++i) base[i] = wrap_centered(x[i] - frame.position[i], L);
    Complex su{}, sv{}, sa{};
    for (int n0 = -reach; n0 <= reach; ++n0) {
      for (int n1 = -reach1; n1 <= reach1; ++n1) {
        const double y[2] = {base[0] + n0 * L, d == 2 ? base[1] + n1 * L : 0.0};
        Complex My[2]{}, Mdy[2]{}, Mddy[2]{};
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            My[i] += M[i][j] * y[j];
            Mdy[i] += Md[i][j] * y[j];
            Mddy[i] += Mdd[i][j] * y[j];
          }
        Complex yMy{}, yMdy{}, yMddy{}, pMy{}, pMdy{};
        double py = 0.0;
        for (int i = 0; i < d; ++i) {
          yMy += y[i] * My[i];
          yMdy += y[i] * Mdy[i];
          yMddy += y[i] * Mddy[i];
          pMy += p[i] * My[i];
          pMdy += p[i] * Mdy[i];
          py += p[i] * y[i];
        }
        const Complex psi = py + 0.5 * yMy;
        if (k * psi.imag() > kWeightCutoff) continue;
        const Complex psi_t = -1.0 + 0.5 * yMdy - pMy;
        const Complex psi_tt = 0.5 * yMddy - 2.0 * pMdy + pMp;
        const Complex e = std::exp(I * k * psi);
        su += A * e;
        sv += (Ad + I * k * psi_t * A) * e;
        sa += (Add + 2.0 * I * k * psi_t * Ad + I * k * psi_tt * A - k * k * psi_t * psi_t * A) * e;
      }
    }
    u[idx] = su;
    v[idx] = sv;
    a[idx] = sa;
  }
  return {Field(grid, FieldKind::position, std::move(u)), Field(grid, FieldKind::velocity, std::move(v)),
          Field(grid, FieldKind::velocity, std::move(a))};
}

BeamSample beam_field(const BeamSpec& spec, const TorusGrid& grid, double t) {
  return quasi_solution(spec, grid, std::nullopt, t);
}

double residual_norm(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                     double t) {
  const auto s = quasi_solution(spec, grid, W, t);
  std::vector<Complex> r(grid.size());
  Spectral::for_grid(grid)->laplacian(s.u.values(), r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double w = W ? W->eval(grid.node(i), t) : 0.0;
    r[i] = s.a[i] - r[i] + 2.0 * w * s.v[i];
  }
  return std::sqrt(l2_norm_squared(grid, r));
}

void BeamVsExactReport::write_csv(std::ostream& out) const {
  write_csv_header(out, {"t", "E_exact", "G_squared", "defect"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    write_csv_row(out, {times[i], energy_exact[i], g_squared[i], std::abs(energy_exact[i] - g_squared[i])});
  }
}

BeamVsExactReport beam_vs_exact(const BeamSpec& spec, const TorusGrid& grid, const std::optional<DampingProfile>& W,
                                 double t_end, SolverConfig config) {
  if (t_end < spec.t0) throw std::invalid_argument("beam_vs_exact: t_end precedes t0");
  const auto init = quasi_solution(spec, grid, W, spec.t0);
  const auto run = evolve(WaveState(init.u, init.v, spec.t0), W, t_end, config);

  BeamVsExactReport r;
  r.times = run.trace.times;
  r.energy_exact = run.trace.energy;
  r.initial_energy = run.trace.energy.front();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double G = W ? propagator_G(*W, spec.gamma, spec.t0, r.times[i]) : 1.0;
    r.g_squared.push_back(G * G);
    r.sup_defect = std::max(r.sup_defect, std::abs(r.energy_exact[i] - G * G));
  }
  r.lower_bound_holds = true;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (!(r.energy_exact[i] > r.initial_energy * (r.g_squared[i] - 2.0 * r.sup_defect))) r.lower_bound_holds = false;
  }
  return r;
}

}  // namespace dampwave
