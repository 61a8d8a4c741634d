#include "dampwave/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "dampwave/csv.hpp"

namespace dampwave {

TorusGrid::TorusGrid(int dim, int points_per_axis, double period)
    : dim_(dim), n_(points_per_axis), period_(period) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("TorusGrid: dim must be 1 or 2, got " + std::to_string(dim));
  }
  if (points_per_axis < 4) {
    throw std::invalid_argument("TorusGrid: points_per_axis must be >= 4");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument("TorusGrid: period must be positive");
  }
}

std::size_t TorusGrid::size() const {
  auto n = static_cast<std::size_t>(n_);
  return dim_ == 1 ? n : n * n;
}

double TorusGrid::cell_volume() const {
  const double h = spacing();
  return dim_ == 1 ? h : h * h;
}

double TorusGrid::max_wavenumber() const {
  return std::sqrt(static_cast<double>(dim_)) * std::numbers::pi * n_ / period_;
}

std::array<int, 2> TorusGrid::multi_index(std::size_t index) const {
  if (dim_ == 1) return {static_cast<int>(index), 0};
  return {static_cast<int>(index / n_), static_cast<int>(index % n_)};
}

Point TorusGrid::node(std::size_t index) const {
  const auto mi = multi_index(index);
  const double h = spacing();
  return {mi[0] * h, dim_ == 2 ? mi[1] * h : 0.0};
}

double wrap_centered(double x, double period) {
  double r = std::fmod(x + 0.5 * period, period);
  if (r < 0.0) r += period;
  return r - 0.5 * period;
}

double wrap_positive(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double torus_distance(const Point& a, const Point& b, int dim, double period) {
  double d2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = wrap_centered(a[i] - b[i], period);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::position: return "position";
    case FieldKind::velocity: return "velocity";
    case FieldKind::damping_snapshot: return "damping-snapshot";
  }
  return "unknown";
}

Field::Field(TorusGrid grid, FieldKind kind, std::vector<Complex> values)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("Field: value count " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
  }
  if (kind_ == FieldKind::damping_snapshot) {
    for (const auto& z : values_) {
      if (z.imag() != 0.0 || z.real() < 0.0 || std::isnan(z.real())) {
        throw std::invalid_argument("Field: damping snapshots must be real and nonnegative");
      }
    }
  }
}

Field Field::zeros(const TorusGrid& grid, FieldKind kind) {
  return Field(grid, kind, std::vector<Complex>(grid.size()));
}

Field Field::sample(const TorusGrid& grid, FieldKind kind,
                    const std::function<Complex(const Point&)>& fn) {
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.node(i));
  return Field(grid, kind, std::move(values));
}

Field Field::with_kind(FieldKind kind) const { return Field(grid_, kind, values_); }

// ---------------------------------------------------------------------------
// Spectral

namespace {

// FFTW's planner is not re-entrant; execution with fftw_execute_dft is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double signed_wavenumber(int m, int n, double period) {
  const int s = (m <= n / 2) ? m : m - n;
  return 2.0 * std::numbers::pi * s / period;
}

}  // namespace

std::shared_ptr<const Spectral> Spectral::for_grid(const TorusGrid& grid) {
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const Spectral>> cache;
  std::lock_guard lock(cache_mutex);
  const auto key = std::make_tuple(grid.dim(), grid.points_per_axis(), grid.period());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto created = std::make_shared<const Spectral>(grid);
  cache.emplace(key, created);
  return created;
}

Spectral::Spectral(const TorusGrid& grid) : grid_(grid), kappa2_(grid.size()) {
  const int n = grid.points_per_axis();
  const double period = grid.period();
  for (std::size_t i = 0; i < kappa2_.size(); ++i) {
    const auto mi = grid.multi_index(i);
    double k2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const double k = signed_wavenumber(mi[a], n, period);
      k2 += k * k;
    }
    kappa2_[i] = k2;
  }

  std::lock_guard lock(planner_mutex());
  auto* in = fftw_alloc_complex(grid.size());
  auto* out = fftw_alloc_complex(grid.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (grid.dim() == 1) {
    forward_plan_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
  } else {
    forward_plan_ = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
  }
  fftw_free(in);
  fftw_free(out);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw std::runtime_error("Spectral: FFTW planning failed");
  }
}

Spectral::~Spectral() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Spectral::forward(std::span<const Complex> in, std::span<Complex> out) const {
  // FFTW never writes to the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), src,
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void Spectral::backward(std::span<const Complex> in, std::span<Complex> out) const {
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), src,
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= scale;
}

void Spectral::laplacian(std::span<const Complex> in, std::span<Complex> out) const {
  std::vector<Complex> coeffs(in.size());
  forward(in, coeffs);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= -kappa2_[i];
  backward(coeffs, out);
}

double Spectral::gradient_norm_squared(std::span<const Complex> u) const {
  std::vector<Complex> coeffs(u.size());
  forward(u, coeffs);
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) acc += kappa2_[i] * std::norm(coeffs[i]);
  // Parseval for the unnormalized DFT: integral = h^d / size * sum |c|^2.
  return acc * grid_.cell_volume() / static_cast<double>(u.size());
}

// ---------------------------------------------------------------------------

namespace {

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw std::invalid_argument(std::string(op) + ": fields live on different grids");
  }
}

}  // namespace

Field laplacian(const Field& f) {
  if (f.kind() != FieldKind::position) {
    throw std::invalid_argument("laplacian: expected a position field");
  }
  std::vector<Complex> out(f.size());
  Spectral::for_grid(f.grid())->laplacian(f.values(), out);
  return Field(f.grid(), FieldKind::position, std::move(out));
}

double l2_norm_squared(const TorusGrid& grid, std::span<const Complex> f) {
  double acc = 0.0;
  for (const auto& z : f) acc += std::norm(z);
  return acc * grid.cell_volume();
}

double energy(const TorusGrid& grid, std::span<const Complex> u, std::span<const Complex> v) {
  const double grad2 = Spectral::for_grid(grid)->gradient_norm_squared(u);
  return 0.5 * (grad2 + l2_norm_squared(grid, v));
}

double energy(const Field& u, const Field& v) {
  require_same_grid(u, v, "energy");
  if (u.kind() != FieldKind::position || v.kind() != FieldKind::velocity) {
    throw std::invalid_argument("energy: expected (position, velocity) fields");
  }
  return energy(u.grid(), u.values(), v.values());
}

Complex inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  Complex acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
  return acc * f.grid().cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(l2_norm_squared(f.grid(), f.values())); }

void write_csv(const Field& f, std::ostream& out) {
  const bool two_d = f.grid().dim() == 2;
  out << (two_d ? "i,j,value_re,value_im\n" : "i,value_re,value_im\n");
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto mi = f.grid().multi_index(idx);
    out << mi[0] << ',';
    if (two_d) out << mi[1] << ',';
    out << format_double(f[idx].real()) << ',' << format_double(f[idx].imag()) << '\n';
  }
}

}  // namespace dampwave
