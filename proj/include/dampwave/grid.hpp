#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace dampwave {

using Complex = std::complex<double>;

/// A point on T¹ or T². For T¹ only the first coordinate is used.
using Point = std::array<double, 2>;

/// Uniform periodic grid on the flat torus T^dim = (R / period Z)^dim.
///
/// Nodes are stored row-major: for dim = 2 the flat index is
/// `i0 * n + i1`, where i0 indexes the first coordinate.
class TorusGrid {
 public:
  TorusGrid(int dim, int points_per_axis, double period = 2.0 * std::numbers::pi);

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double period() const { return period_; }
  double spacing() const { return period_ / n_; }
  std::size_t size() const;
  /// Quadrature weight of one node, h^dim.
  double cell_volume() const;
  /// Largest |wavenumber| representable on the grid (sqrt(dim) * pi * n / period).
  double max_wavenumber() const;

  Point node(std::size_t index) const;
  std::array<int, 2> multi_index(std::size_t index) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int dim_;
  int n_;
  double period_;
};

/// Reduce a coordinate to [-period/2, period/2).
double wrap_centered(double x, double period);
/// Reduce a coordinate to [0, period).
double wrap_positive(double x, double period);
/// Periodic Euclidean distance between two points of the torus.
double torus_distance(const Point& a, const Point& b, int dim, double period);

enum class FieldKind { position, velocity, damping_snapshot };

const char* to_string(FieldKind kind);

/// Complex samples of a function on the nodes of a TorusGrid.
class Field {
 public:
  Field(TorusGrid grid, FieldKind kind, std::vector<Complex> values);

  static Field zeros(const TorusGrid& grid, FieldKind kind);
  static Field sample(const TorusGrid& grid, FieldKind kind,
                      const std::function<Complex(const Point&)>& fn);

  const TorusGrid& grid() const { return grid_; }
  FieldKind kind() const { return kind_; }
  std::span<const Complex> values() const { return values_; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  Field with_kind(FieldKind kind) const;

 private:
  TorusGrid grid_;
  FieldKind kind_;
  std::vector<Complex> values_;
};

/// FFT-backed spectral operators for one grid. Instances are shared and
/// immutable; all member functions are safe to call concurrently.
class Spectral {
 public:
  static std::shared_ptr<const Spectral> for_grid(const TorusGrid& grid);

  explicit Spectral(const TorusGrid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const TorusGrid& grid() const { return grid_; }

  /// Unnormalized forward DFT.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Inverse DFT including the 1/size normalization.
  void backward(std::span<const Complex> in, std::span<Complex> out) const;

  /// |kappa|^2 for each Fourier coefficient, in FFT storage order.
  std::span<const double> wavenumber_squared() const { return kappa2_; }

  void laplacian(std::span<const Complex> in, std::span<Complex> out) const;
  /// Integral of |grad u|^2 over the torus.
  double gradient_norm_squared(std::span<const Complex> u) const;

 private:
  TorusGrid grid_;
  std::vector<double> kappa2_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Exact spectral Laplacian of the trigonometric interpolant of `f`.
Field laplacian(const Field& f);

/// E = 1/2 * integral(|grad u|^2 + |v|^2).
double energy(const Field& u, const Field& v);
double energy(const TorusGrid& grid, std::span<const Complex> u, std::span<const Complex> v);

/// Integral of f * conj(g).
Complex inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
double l2_norm_squared(const TorusGrid& grid, std::span<const Complex> f);

/// One row per node: index columns, then value_re, value_im.
void write_csv(const Field& f, std::ostream& out);

}  // namespace dampwave
